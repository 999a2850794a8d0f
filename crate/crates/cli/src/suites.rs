//! Suite runners. Each produces catalog-tagged check reports; suites are
//! independent and run on the worker pool.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;
use std::time::Instant;

use lattice_bv::bvtheory::theorems::{
    cauchy_quasi_inverse, verify_causality_vanishing, verify_green_identities, verify_time_ordered_half,
};
use lattice_bv::bvtheory::{PairingKind, Site, Theory};
use lattice_bv::complexes::{LinComb, LinMap};
use lattice_bv::lattice::{make_cutoff, Region};
use lattice_bv::quantize::{Quantization, SymPowerHomotopy};
use lattice_bv::sampling::{multisets, rng, SampleRng};
use lattice_bv::scalar::rat;
use lattice_bv::symalg::{
    check_bider_naturality, check_bider_oracle, check_binomial, check_commutation, check_differential_compat,
    check_laplacian_oracle, check_naturality, random_element, random_word, AbstractSpace, Laplacian, SymElement,
};
use lattice_bv::verify::{CheckReport, Counterexample};
use lattice_bv::HScalar;

use crate::config::{RunConfig, Setup};

pub type SuiteFn = fn(&Ctx) -> Vec<Outcome>;

pub const SUITES: &[(&str, SuiteFn)] = &[
    ("algebra", algebra),
    ("structures", structures),
    ("theorems", theorems),
    ("quantization", quantization),
    ("comparison", comparison),
    ("timeslice", timeslice),
];

pub struct Ctx<'a> {
    pub cfg: &'a RunConfig,
    pub setup: &'a Setup,
    pub seed: u64,
}

pub struct Outcome {
    pub id: &'static str,
    pub report: CheckReport,
    pub wall_ms: u64,
}

impl Ctx<'_> {
    fn th(&self) -> &Arc<Theory> {
        &self.setup.theory
    }

    fn region(&self, name: &str) -> Region {
        self.setup.regions[name].clone()
    }

    fn regions(&self, names: &[String]) -> Vec<Region> {
        names.iter().map(|n| self.region(n)).collect()
    }

    fn basis(&self, r: &Region) -> Vec<Site> {
        self.th().model.delta_basis(r.points().expect("finite region").iter())
    }

    fn window(&self) -> Vec<Site> {
        let w = self.cfg.window;
        self.th().model.delta_basis(self.th().model.window_points(-w..=w, -w..=w).iter())
    }

    fn rng(&self, salt: u64) -> SampleRng {
        rng(self.seed.wrapping_mul(1_000_003).wrapping_add(salt))
    }

    fn tuple_samples(&self, regions: &[Region], count: usize, salt: u64) -> Vec<Vec<SymElement<Site>>> {
        let mut r = self.rng(salt);
        (0..count).map(|_| regions.iter().map(|reg| random_element(&mut r, &self.basis(reg), 2, 2)).collect()).collect()
    }
}

/// Collects reports with their catalog ids and timings.
#[derive(Default)]
struct Out(Vec<Outcome>);

impl Out {
    fn one(&mut self, id: &'static str, f: impl FnOnce() -> CheckReport) {
        self.many(&[id], || vec![f()]);
    }

    /// `ids` names the reports in order; a single id covers all of them.
    fn many(&mut self, ids: &[&'static str], f: impl FnOnce() -> Vec<CheckReport>) {
        let start = Instant::now();
        let reports = f();
        let wall_ms = start.elapsed().as_millis() as u64;
        assert!(ids.len() == 1 || ids.len() == reports.len(), "catalog ids do not match reports");
        for (i, report) in reports.into_iter().enumerate() {
            self.0.push(Outcome { id: ids[i.min(ids.len() - 1)], report, wall_ms });
        }
    }

    fn fallible(&mut self, id: &'static str, name: &str, f: impl FnOnce() -> lattice_bv::Result<CheckReport>) {
        self.one(id, || f().unwrap_or_else(|e| failed(name, &e.to_string())));
    }

    fn nontrivial(&mut self, name: &str, ok: bool) {
        let mut r = CheckReport::new(format!("nontrivial: {name}"));
        r.record((!ok).then(|| Counterexample::new(name, "inputs exercise nothing", 0)));
        self.0.push(Outcome { id: "nontrivial", report: r, wall_ms: 0 });
    }
}

fn failed(name: &str, detail: &str) -> CheckReport {
    let mut r = CheckReport::new(name);
    r.fail(Counterexample::new(name, detail, 0));
    r
}

/// Runs one suite, turning a panic into a failed record.
pub fn run_suite(f: SuiteFn, ctx: &Ctx, suite: &str) -> Vec<Outcome> {
    catch_unwind(AssertUnwindSafe(|| f(ctx))).unwrap_or_else(|p| {
        let msg = p
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_else(|| "panic".into());
        vec![Outcome { id: "nontrivial", report: failed(&format!("suite {suite} aborted"), &msg), wall_ms: 0 }]
    })
}

fn algebra(ctx: &Ctx) -> Vec<Outcome> {
    let mut out = Out::default();
    let mut r = ctx.rng(1);
    let space = AbstractSpace::random(&mut r, 40);
    let l_even = Laplacian::new(space.random_pairing(&mut r, 0, 1, 0.3)).expect("symmetric");
    let l_odd = Laplacian::new(space.random_pairing(&mut r, 1, 1, 0.3)).expect("symmetric");
    let l_odd2 = Laplacian::new(space.random_pairing(&mut r, 1, 1, 0.3)).expect("symmetric");
    let n = ctx.cfg.samples * 5;
    let samples: Vec<_> = (0..n).map(|_| random_element(&mut r, &space.gens, 6, 3)).collect();
    let pairs: Vec<_> =
        (0..n).map(|_| (random_element(&mut r, &space.gens, 3, 2), random_element(&mut r, &space.gens, 3, 2))).collect();
    let hit = samples.iter().filter(|a| !l_even.apply(a).is_zero()).count();
    out.nontrivial("Δ nonzero on a fifth of the samples", hit * 5 >= n);
    for lap in [&l_even, &l_odd] {
        out.one("alg-laplacian-explicit", || check_laplacian_oracle(lap, &samples));
        out.one("alg-d-laplacian", || check_differential_compat(lap, &space.d, &samples));
        out.one("alg-binomial", || check_binomial(lap, &pairs, 3));
        out.one("alg-bider-closed-form", || check_bider_oracle(&lap.tau, &pairs));
    }
    out.one("alg-laplacian-commute", || check_commutation(&l_even, &l_odd, &samples));
    out.one("alg-laplacian-commute", || check_commutation(&l_odd, &l_odd2, &samples));

    let th = ctx.th();
    let pool = ctx.window();
    let model_pairs: Vec<_> =
        (0..ctx.cfg.samples).map(|_| (random_element(&mut r, &pool, 3, 2), random_element(&mut r, &pool, 3, 2))).collect();
    let l = *th.lattice();
    let shift = LinMap::new(0, move |s: &Site| LinComb::basis(Site { t: s.t + 3, x: l.wrap(s.x + 4), ..*s }));
    for (what, f) in [("inclusion", LinMap::identity()), ("translation", shift)] {
        for kind in [PairingKind::MinusOne, PairingKind::Zero, PairingKind::Dirac] {
            let tau = th.oracle(kind);
            out.one("alg-naturality", || {
                let mut rep = check_bider_naturality(&f, &tau, &tau, &model_pairs);
                rep.name = format!("{} under {what}, {kind:?}", rep.name);
                rep
            });
        }
        for kind in [PairingKind::MinusOne, PairingKind::Dirac] {
            let lap = Laplacian::new(th.oracle(kind)).expect("symmetric");
            out.one("alg-naturality", || {
                let mut rep = check_naturality(&f, &lap, &lap, &model_pairs);
                rep.name = format!("{} under {what}, {kind:?}", rep.name);
                rep
            });
        }
    }
    out.0
}

fn all_pairs(sites: &[Site]) -> Vec<(Site, Site)> {
    sites.iter().flat_map(|a| sites.iter().map(move |b| (*a, *b))).collect()
}

fn structures(ctx: &Ctx) -> Vec<Outcome> {
    let mut out = Out::default();
    let th = ctx.th();
    let sites = ctx.window();
    let pairs = all_pairs(&sites);
    out.nontrivial("τ(0) nonzero in the window", pairs.iter().any(|(a, b)| th.tau_0(a, b) != rat(0, 1)));
    out.one("def-metric-compat", || th.model.verify_metric_compat(&pairs));
    out.many(
        &["def-witness-i", "def-complex", "def-witness-ii", "rem-commute", "rem-commute", "def-witness-iii", "rem-commute"],
        || th.model.verify_witness(&sites, &pairs),
    );
    let span = 6 + 3 * ctx.cfg.window;
    out.many(
        &["green-inverse", "green-inverse", "green-support", "green-distinct", "green-commute", "green-commute", "green-adjoint"],
        || verify_green_identities(th, &sites, -span, span),
    );
    out.many(
        &["struct-pairings", "struct-pairings", "struct-pairings", "struct-dirac-trivializes"],
        || th.verify_structures(&pairs),
    );
    out.0
}

fn theorems(ctx: &Ctx) -> Vec<Outcome> {
    let mut out = Out::default();
    let th = ctx.th();
    for [a, b] in &ctx.cfg.spacelike {
        let (r1, r2) = (ctx.region(a), ctx.region(b));
        out.fallible("thm-3.7a-causality", &format!("tau(0) on ({a}, {b})"), || {
            verify_causality_vanishing(th, &r1, &r2).map(|mut rep| {
                rep.name = format!("{} on ({a}, {b})", rep.name);
                rep
            })
        });
    }
    for [a, b] in &ctx.cfg.time_ordered {
        let (later, earlier) = (ctx.region(a), ctx.region(b));
        out.fallible("prop-3.8-half", &format!("half identity on ({a}, {b})"), || {
            verify_time_ordered_half(th, &later, &earlier).map(|mut rep| {
                rep.name = format!("{} on ({a}, {b})", rep.name);
                rep
            })
        });
    }
    let sc = &ctx.cfg.slab;
    let l = *th.lattice();
    match l.slab(sc.t0, sc.t1).and_then(|slab| cauchy_quasi_inverse(th, &slab, make_cutoff(sc.cut))) {
        Ok(qi) => {
            let m = &th.model;
            let outer = m.delta_basis(m.window_points(sc.t0 - 1..=sc.t1 + 1, 0..=l.sites - 1).iter());
            let inner = m.delta_basis(m.window_points(sc.t0 + 2..=sc.t1 - 2, 0..=l.sites - 1).iter());
            out.nontrivial("g nonzero on the slab", outer.iter().any(|s| !qi.g.apply_gen(s).is_zero()));
            out.many(&["thm-3.7b-quasi-inverse"], || qi.verify_ambient(&outer));
            out.many(&["thm-3.7b-quasi-inverse"], || qi.verify_region(&inner));
        }
        Err(e) => out.one("thm-3.7b-quasi-inverse", || failed("Cauchy quasi-inverse", &e.to_string())),
    }
    out.0
}

fn quantization(ctx: &Ctx) -> Vec<Outcome> {
    let mut out = Out::default();
    let th = ctx.th();
    let q = match Quantization::new(th) {
        Ok(q) => q,
        Err(e) => {
            out.one("bv-square", || failed("quantization", &e.to_string()));
            return out.0;
        }
    };
    let pool = ctx.window();
    let n = ctx.cfg.samples;
    let mut r = ctx.rng(4);
    let samples: Vec<_> = (0..n * 3).map(|_| random_element(&mut r, &pool, 5, 2)).collect();
    let triples: Vec<_> = (0..n)
        .map(|_| (random_element(&mut r, &pool, 3, 2), random_element(&mut r, &pool, 3, 2), random_element(&mut r, &pool, 2, 2)))
        .collect();
    out.nontrivial("Δ_BV nonzero on some sample", samples.iter().any(|a| !q.delta_bv.apply(a).is_zero()));
    out.one("bv-square", || q.verify_bv_square(&samples));
    out.many(&["bv-filtration"], || q.filtration_check(&samples, ctx.cfg.p_max));
    out.many(
        &["moyal-algebra", "moyal-algebra", "moyal-algebra", "moyal-classical", "moyal-classical"],
        || q.verify_moyal(&triples),
    );
    out.many(&["dirac-product"], || q.verify_dirac(&triples));
    for [a, b] in &ctx.cfg.spacelike {
        let (r1, r2) = (ctx.region(a), ctx.region(b));
        out.fallible("einstein-causality", &format!("causality on ({a}, {b})"), || q.verify_einstein_causality(&r1, &r2, 1));
    }
    for (i, names) in ctx.cfg.tuples.iter().enumerate() {
        let regions = ctx.regions(names);
        let s = ctx.tuple_samples(&regions, n / 4 + 1, 100 + i as u64);
        out.fallible("tpfa-chainmap", "tpfa chain map", || {
            q.verify_tpfa_chain_map(&regions, &s).map(|mut rep| {
                rep.name = format!("{} on {names:?}", rep.name);
                rep
            })
        });
        let s = ctx.tuple_samples(&regions, n, 200 + i as u64);
        out.fallible("lemma-4.5-dirac", "Dirac product", || {
            q.verify_dirac_computes_fa(&regions, &s).map(|mut rep| {
                rep.name = format!("{} on {names:?}", rep.name);
                rep
            })
        });
    }
    for (i, [a, b]) in ctx.cfg.time_ordered.iter().enumerate() {
        let (later, earlier) = (ctx.region(a), ctx.region(b));
        let pairs: Vec<_> = ctx
            .tuple_samples(&[later.clone(), earlier.clone()], n, 300 + i as u64)
            .into_iter()
            .map(|v| (v[0].clone(), v[1].clone()))
            .collect();
        out.fallible("lemma-4.5-dirac", "bracket powers", || q.verify_dirac_half_powers(&later, &earlier, &pairs, 3));
    }
    out.0
}

/// Every word of length at most 2 over `pool`, then `extra` random words of
/// length 3 and 4.
fn comparison_words(pool: &[Site], extra: usize, r: &mut SampleRng) -> Vec<SymElement<Site>> {
    let mut out: Vec<SymElement<Site>> = Vec::new();
    for len in 0..=2 {
        out.extend(multisets(pool, len).into_iter().map(|raw| SymElement::monomial(raw, &HScalar::one())));
    }
    out.extend((0..extra).map(|i| random_word(r, pool, 3 + i % 2)));
    out.retain(|w| !w.is_zero());
    out
}

fn comparison(ctx: &Ctx) -> Vec<Outcome> {
    let mut out = Out::default();
    let th = ctx.th();
    let q = match Quantization::new(th) {
        Ok(q) => q,
        Err(e) => {
            out.one("thm-4.6-chainmap", || failed("quantization", &e.to_string()));
            return out.0;
        }
    };
    let mut pool = ctx.window();
    if let Some(first) = ctx.cfg.regions.first() {
        pool.extend(ctx.basis(&ctx.region(first.name())));
        pool.sort();
        pool.dedup();
    }
    let n = ctx.cfg.samples;
    let mut r = ctx.rng(5);
    let words = comparison_words(&pool, n * 5, &mut r);
    let moved = words.iter().filter(|a| !q.delta_d.apply(a).is_zero()).count();
    out.nontrivial(&format!("Δ_D nonzero on {moved} of {} words", words.len()), moved * 20 >= words.len());
    out.nontrivial("Δ_D² nonzero on some word", words.iter().any(|a| !q.delta_d.power(a, 2).is_zero()));
    out.one("thm-4.6-chainmap", || q.verify_chain_map(&words));
    out.one("thm-4.6-inverse", || q.verify_inverse(&words));
    let pairs: Vec<_> = (0..n * 3).map(|i| (random_word(&mut r, &pool, i % 3), random_word(&mut r, &pool, 1 + i % 2))).collect();
    out.one("thm-4.6-multiplicative", || q.verify_multiplicative(&pairs));
    out.one("thm-4.6-naturality", || q.verify_translation_naturality(&words, 4, 7));
    for (i, names) in ctx.cfg.tuples.iter().enumerate() {
        let regions = ctx.regions(names);
        let s = ctx.tuple_samples(&regions, 4, 500 + i as u64);
        out.fallible("thm-4.6-factorization", "factorization", || q.verify_factorization_compat(&regions, &s));
    }
    out.0
}

fn timeslice(ctx: &Ctx) -> Vec<Outcome> {
    let mut out = Out::default();
    let th = match ctx.cfg.timeslice_theory() {
        Ok(th) => th,
        Err(e) => {
            out.one("timeslice-sym-power", || failed("time-slice ring", &e.0));
            return out.0;
        }
    };
    let sc = &ctx.cfg.slab;
    let l = *th.lattice();
    let built = l.slab(sc.t0, sc.t1).and_then(|slab| cauchy_quasi_inverse(&th, &slab, make_cutoff(sc.cut)));
    let (qi, q) = match built.and_then(|qi| Quantization::new(&th).map(|q| (qi, q))) {
        Ok(v) => v,
        Err(e) => {
            out.one("timeslice-sym-power", || failed("Cauchy quasi-inverse", &e.to_string()));
            return out.0;
        }
    };
    let ambient = SymPowerHomotopy { e: qi.g.clone(), h: qi.eta.clone(), q: q.q.clone() };
    let region = SymPowerHomotopy { e: qi.g.clone(), h: qi.zeta.clone(), q: q.q.clone() };
    let m = &th.model;
    let outer = m.delta_basis(m.window_points(sc.t0 - 1..=sc.t1 + 1, 0..=l.sites - 1).iter());
    let inner = m.delta_basis(m.window_points(sc.t0 + 2..=sc.t1 - 2, 0..=l.sites - 1).iter());
    let count = ctx.cfg.samples.div_ceil(2).max(5);
    let mut r = ctx.rng(6);
    for p in 0..=ctx.cfg.p_max {
        let mut draw = |pool: &[Site]| -> Vec<_> {
            (0..count).filter_map(|_| random_word(&mut r, pool, p).keys().next().cloned()).collect()
        };
        let (wa, wr) = (draw(&outer), draw(&inner));
        out.one("timeslice-sym-power", || ambient.verify(&format!("Sym^{p}: dH = id - Sym^{p}(f g) on the ambient"), &wa));
        out.one("timeslice-sym-power", || region.verify(&format!("Sym^{p}: dZ = id - Sym^{p}(g f) on the slab"), &wr));
    }
    out.0
}
