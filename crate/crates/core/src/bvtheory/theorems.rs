//! Causality of `τ(0)`, the Cauchy quasi-inverse and the time-ordered
//! relation between `τ_D` and `τ(0)`.

use std::sync::Arc;

use num_traits::Zero;

use super::pairing::{Prop, Theory};
use super::stencil::{Section, Site};
use crate::complexes::{check_homotopy, LinComb, LinMap};
use crate::error::{Error, Result};
use crate::lattice::{CutoffData, Region};
use crate::scalar::{rat, Rational};
use crate::verify::{check_all, CheckReport, Counterexample};

fn region_sites(th: &Theory, r: &Region) -> Result<Vec<Site>> {
    let pts = r.points().ok_or_else(|| Error::Unsupported("delta basis of an infinite region".into()))?;
    Ok(th.model.delta_basis(pts.iter()))
}

fn all_pairs(a: &[Site], b: &[Site]) -> Vec<(Site, Site)> {
    a.iter().flat_map(|x| b.iter().map(move |y| (*x, *y))).collect()
}

/// `τ(0)` vanishes on every pair of generators from causally disjoint
/// regions.
pub fn verify_causality_vanishing(th: &Theory, r1: &Region, r2: &Region) -> Result<CheckReport> {
    if !th.lattice().causally_disjoint(r1, r2)? {
        return Err(Error::Precondition("regions are not causally disjoint".into()));
    }
    let pairs = all_pairs(&region_sites(th, r1)?, &region_sites(th, r2)?);
    Ok(check_all("tau(0) vanishes across causally disjoint regions", &pairs, |(a, b)| {
        let v = th.tau_0(a, b);
        (!v.is_zero()).then(|| Counterexample::new(format!("{a:?} x {b:?}"), format!("tau(0) = {v}"), 2))
    }))
}

/// A generator pair with nonzero `τ(0)`, if one exists.
pub fn find_nonzero_tau0(th: &Theory, r1: &Region, r2: &Region) -> Result<Option<(Site, Site, Rational)>> {
    for (a, b) in all_pairs(&region_sites(th, r1)?, &region_sites(th, r2)?) {
        let v = th.tau_0(&a, &b);
        if !v.is_zero() {
            return Ok(Some((a, b, v)));
        }
    }
    Ok(None)
}

/// The data `(g, η, ζ)` exhibiting a Cauchy region inclusion as a homotopy
/// equivalence.
pub struct QuasiInverse {
    pub theory: Arc<Theory>,
    pub region: Region,
    pub cutoff: CutoffData,
    /// `g = [Q, χ+] Λ`, landing in sections supported near the cut.
    pub g: LinMap<Site, Site>,
    /// `η = -(χ- Λ+ + χ+ Λ-)` on the ambient complex.
    pub eta: LinMap<Site, Site>,
    /// `η` restricted to sections of the region.
    pub zeta: LinMap<Site, Site>,
}

pub fn cauchy_quasi_inverse(th: &Arc<Theory>, region: &Region, cutoff: CutoffData) -> Result<QuasiInverse> {
    let l = th.lattice();
    if !l.is_cauchy_region(region) {
        return Err(Error::Precondition("region contains no full time slice".into()));
    }
    for t in cutoff.sigma_minus()..=cutoff.sigma_plus() {
        if !l.slice(t).all(|p| region.contains(&p)) {
            return Err(Error::Precondition(format!("slice t = {t} of the cutoff is not inside the region")));
        }
    }
    let t0 = cutoff.t0;
    let rq = th.model.q.time_radius();
    let rw = th.model.w.time_radius() + 1;

    let me = th.clone();
    let g = LinMap::new(0, move |s: &Site| {
        let u = me.lambda_apply(Prop::Causal, &Section::basis(*s), t0 - 2 * rq, t0 + 1 + 2 * rq);
        let plus = u.filter(|p| cutoff.chi_plus(&p.point()));
        let commutator = me.model.apply_q(&plus).minus(&me.model.apply_q(&u).filter(|p| cutoff.chi_plus(&p.point())));
        commutator.filter(|p| p.t >= t0 + 1 - rq && p.t <= t0 + rq)
    });

    let me = th.clone();
    let eta_fn = move |s: &Site| -> Section {
        let src = Section::basis(*s);
        let span = me.model.p.time_radius() + rw;
        let lower = me
            .lambda_apply(Prop::Retarded, &src, s.t - span, t0)
            .filter(|p| cutoff.chi_minus(&p.point()));
        let upper = me
            .lambda_apply(Prop::Advanced, &src, t0 + 1, s.t + span)
            .filter(|p| cutoff.chi_plus(&p.point()));
        lower.plus(&upper).neg()
    };
    let eta_fn = Arc::new(eta_fn);
    let e1 = eta_fn.clone();
    let eta = LinMap::new(-1, move |s: &Site| e1(s));
    let e2 = eta_fn;
    let zeta = LinMap::new(-1, move |s: &Site| e2(s));
    Ok(QuasiInverse { theory: th.clone(), region: region.clone(), cutoff, g, eta, zeta })
}

impl QuasiInverse {
    fn support_check(&self, name: &str, map: &LinMap<Site, Site>, sites: &[Site]) -> CheckReport {
        check_all(name, sites, |s| {
            let img = map.apply_gen(s);
            let outside = img.keys().find(|p| !self.region.contains(&p.point())).copied();
            outside.map(|p| Counterexample::new(format!("{s:?}"), format!("image leaves the region at {p:?}"), 1))
        })
    }

    /// `∂η = id - f∗g` on ambient generators, and `g` lands in the region.
    pub fn verify_ambient(&self, sites: &[Site]) -> Vec<CheckReport> {
        let c = self.theory.ambient_complex();
        let id = LinMap::identity();
        let mut h = check_homotopy(&self.g, &id, &self.eta, &c, &c, sites);
        h.name = "d eta = id - f g".into();
        vec![h, self.support_check("g lands in the region", &self.g, sites)]
    }

    /// `∂ζ = id - g f∗` on generators of the region, with `ζ` and `g`
    /// landing in the region.
    pub fn verify_region(&self, sites: &[Site]) -> Vec<CheckReport> {
        let c = self.theory.ambient_complex();
        let id = LinMap::identity();
        let mut h = check_homotopy(&self.g, &id, &self.zeta, &c, &c, sites);
        h.name = "d zeta = id - g f".into();
        vec![h, self.support_check("zeta stays in the region", &self.zeta, sites)]
    }

    /// `g` on a section already concentrated near the cut.
    pub fn apply_g(&self, v: &Section) -> Section {
        self.g.apply(v)
    }
}

/// `τ_D = τ(0) / 2` on generators of a time-ordered pair `(R1, R2)`.
pub fn verify_time_ordered_half(th: &Theory, r1: &Region, r2: &Region) -> Result<CheckReport> {
    if !th.lattice().is_time_ordered(&[r1.clone(), r2.clone()])? {
        return Err(Error::Precondition("pair is not time-ordered".into()));
    }
    let pairs = all_pairs(&region_sites(th, r1)?, &region_sites(th, r2)?);
    Ok(check_all("tau_D = tau(0)/2 on time-ordered pairs", &pairs, |(a, b)| {
        let lhs = th.tau_d(a, b);
        let rhs = th.tau_0(a, b) * rat(1, 2);
        (lhs != rhs).then(|| Counterexample::new(format!("{a:?} x {b:?}"), format!("{lhs} vs {rhs}"), 2))
    }))
}

/// A pair on which `τ_D ≠ τ(0)/2`, searched without any ordering
/// precondition.
pub fn find_half_violation(th: &Theory, r1: &Region, r2: &Region) -> Result<Option<(Site, Site)>> {
    Ok(all_pairs(&region_sites(th, r1)?, &region_sites(th, r2)?)
        .into_iter()
        .find(|(a, b)| th.tau_d(a, b) != th.tau_0(a, b) * rat(1, 2)))
}

/// A section concentrated at one site, for convenience in tests.
pub fn delta(s: Site) -> Section {
    LinComb::basis(s)
}

/// Green operator identities on the delta basis of `sites`, with all
/// solutions computed on the time window `[t_lo, t_hi]`:
/// `P G± = id`, `G± P = id`, cone support, `G+ ≠ G-`, commutation with
/// `Q` and `W`, adjointness of `G±` and skew-adjointness of `G`.
pub fn verify_green_identities(th: &Theory, sites: &[Site], t_lo: i64, t_hi: i64) -> Vec<CheckReport> {
    let m = &th.model;
    let l = th.lattice();
    let r = m.stencil_radius();
    let interior = |v: &Section| v.filter(|p| p.t >= t_lo + r && p.t <= t_hi - r);
    let solve = |prop: Prop, v: &Section| th.green_apply(prop, v, t_lo, t_hi);
    let solutions: Vec<(Section, Section)> = {
        let idx: Vec<usize> = (0..sites.len()).collect();
        let mut out: Vec<Option<(Section, Section)>> = vec![None; sites.len()];
        let computed: Vec<(usize, (Section, Section))> = {
            use rayon::prelude::*;
            idx.par_iter()
                .map(|&i| {
                    let d = Section::basis(sites[i]);
                    (i, (solve(Prop::Retarded, &d), solve(Prop::Advanced, &d)))
                })
                .collect()
        };
        for (i, s) in computed {
            out[i] = Some(s);
        }
        out.into_iter().map(|s| s.expect("solution")).collect()
    };
    let idx: Vec<usize> = (0..sites.len()).collect();
    let fail = |i: usize, detail: String| Some(Counterexample::new(format!("{:?}", sites[i]), detail, 1));
    let mut out = Vec::new();

    out.push(check_all("P G± phi = phi", &idx, |&i| {
        let d = Section::basis(sites[i]);
        for (name, u) in [("retarded", &solutions[i].0), ("advanced", &solutions[i].1)] {
            let diff = interior(&m.apply_p(u)).minus(&d);
            if !diff.is_zero() {
                return fail(i, format!("{name}: P G phi - phi = {diff:?}"));
            }
        }
        None
    }));
    out.push(check_all("G± P phi = phi", &idx, |&i| {
        let d = Section::basis(sites[i]);
        let pd = m.apply_p(&d);
        for prop in [Prop::Retarded, Prop::Advanced] {
            let diff = solve(prop, &pd).minus(&d);
            if !diff.is_zero() {
                return fail(i, format!("{prop:?}: G P phi - phi = {diff:?}"));
            }
        }
        None
    }));
    out.push(check_all("supp G± phi inside the causal future/past", &idx, |&i| {
        let p = sites[i].point();
        let bad = solutions[i]
            .0
            .keys()
            .find(|q| !l.in_future_of(&p, &q.point()))
            .or_else(|| solutions[i].1.keys().find(|q| !l.in_future_of(&q.point(), &p)))
            .copied();
        bad.and_then(|q| fail(i, format!("support reaches {q:?}")))
    }));
    let mut distinct = CheckReport::new("G+ differs from G-");
    if !idx.iter().any(|&i| solutions[i].0 != solutions[i].1) {
        distinct.fail(Counterexample::new("window", "G+ and G- agree on every delta", sites.len()));
    } else {
        distinct.record(None);
    }
    out.push(distinct);
    for (name, op) in [("Q", &m.q), ("W", &m.w)] {
        out.push(check_all(&format!("G± commutes with {name}"), &idx, |&i| {
            let d = Section::basis(sites[i]);
            let od = op.apply(l, &d);
            for (prop, u) in [(Prop::Retarded, &solutions[i].0), (Prop::Advanced, &solutions[i].1)] {
                let lhs = interior(&op.apply(l, u));
                let rhs = interior(&solve(prop, &od));
                if lhs != rhs {
                    return fail(i, format!("{prop:?}: difference {:?}", lhs.minus(&rhs)));
                }
            }
            None
        }));
    }
    let pairs: Vec<(usize, usize)> = idx.iter().flat_map(|&a| idx.iter().map(move |&b| (a, b))).collect();
    out.push(check_all("G+ and G- are formally adjoint, G skew-adjoint", &pairs, |&(a, b)| {
        let (da, db) = (Section::basis(sites[a]), Section::basis(sites[b]));
        let lhs = m.integrate(&solutions[a].0, &db);
        let rhs = m.integrate(&da, &solutions[b].1);
        let g_a = solutions[a].0.minus(&solutions[a].1);
        let g_b = solutions[b].0.minus(&solutions[b].1);
        let skew = &m.integrate(&g_a, &db) + &m.integrate(&da, &g_b);
        (lhs != rhs || !skew.is_zero()).then(|| {
            Counterexample::new(format!("{:?} x {:?}", sites[a], sites[b]), format!("{lhs} vs {rhs}, skew defect {skew}"), 2)
        })
    }));
    out
}
