use std::sync::Arc;
use std::time::Instant;

use lattice_bv::bvtheory::theorems::cauchy_quasi_inverse;
use lattice_bv::bvtheory::{FreeBVModel, Site, Theory};
use lattice_bv::lattice::{make_cutoff, Lattice, Point, Region};
use lattice_bv::quantize::{Quantization, SymPowerHomotopy};
use lattice_bv::sampling::rng;
use lattice_bv::scalar::rat;
use lattice_bv::symalg::{random_element, random_word, SymElement, Word};
use lattice_bv::verify::CheckReport;

fn models(n: i64) -> Vec<Arc<Theory>> {
    let l = Lattice::new(n, 1).unwrap();
    vec![
        Theory::new(FreeBVModel::kg(l, rat(1, 1), rat(1, 1))).unwrap(),
        Theory::new(FreeBVModel::maxwell2d(l)).unwrap(),
    ]
}

fn diamond(th: &Theory, t: i64, x: i64) -> Region {
    th.lattice().causal_hull(&[Point { t, x }, Point { t: t + 2, x }]).unwrap()
}

fn basis(th: &Theory, r: &Region) -> Vec<Site> {
    th.model.delta_basis(r.points().unwrap().iter())
}

fn ok(r: &CheckReport) {
    assert!(r.passed(), "{}", r.summary());
    assert!(r.checked > 0, "{} checked nothing", r.name);
}

#[test]
fn bv_differential_squares_to_zero() {
    for th in models(11) {
        let q = Quantization::new(&th).unwrap();
        let pool = basis(&th, &diamond(&th, 0, 0));
        let mut r = rng(1);
        let samples: Vec<_> = (0..40).map(|_| random_element(&mut r, &pool, 6, 2)).collect();
        ok(&q.verify_bv_square(&samples));
        for rep in q.filtration_check(&samples, 3) {
            ok(&rep);
        }
    }
}

#[test]
fn moyal_and_einstein_causality() {
    for th in models(13) {
        let q = Quantization::new(&th).unwrap();
        let pool = basis(&th, &diamond(&th, 0, 0));
        let mut r = rng(2);
        let triples: Vec<_> = (0..20)
            .map(|_| (random_element(&mut r, &pool, 3, 2), random_element(&mut r, &pool, 3, 2), random_element(&mut r, &pool, 2, 2)))
            .collect();
        for rep in q.verify_moyal(&triples) {
            ok(&rep);
        }
        let (d1, d2) = (diamond(&th, 0, 0), diamond(&th, 0, 6));
        ok(&q.verify_einstein_causality(&d1, &d2, 1).unwrap());
        assert!(q.find_nonzero_commutator(&d1, &diamond(&th, 3, 0)).unwrap().is_some());
        for rep in q.verify_dirac(&triples) {
            ok(&rep);
        }
        assert!(q.find_dirac_defect(&pool).is_some());
    }
}

fn tuple_samples(th: &Theory, regions: &[Region], count: usize, seed: u64) -> Vec<Vec<SymElement<Site>>> {
    let mut r = rng(seed);
    (0..count)
        .map(|_| regions.iter().map(|reg| random_element(&mut r, &basis(th, reg), 2, 2)).collect())
        .collect()
}

#[test]
fn comparison_identities() {
    for th in models(13) {
        let t0 = Instant::now();
        let q = Quantization::new(&th).unwrap();
        let pool = basis(&th, &diamond(&th, 0, 0));
        let mut r = rng(3);
        let words: Vec<_> = (0..30)
            .map(|i| random_word(&mut r, &pool, i % 5))
            .filter(|w| !w.is_zero())
            .collect();
        ok(&q.verify_chain_map(&words));
        ok(&q.verify_inverse(&words));
        ok(&q.verify_translation_naturality(&words, 3, 5));
        let pairs: Vec<_> = (0..20).map(|_| (random_word(&mut r, &pool, 2), random_word(&mut r, &pool, 2))).collect();
        ok(&q.verify_multiplicative(&pairs));

        let stack = [diamond(&th, 4, 0), diamond(&th, 12, 0), diamond(&th, 0, 0), diamond(&th, 8, 0)];
        for n in 0..=4 {
            let regions = &stack[..n];
            let samples = tuple_samples(&th, regions, 3, 10 + n as u64);
            ok(&q.verify_factorization_compat(regions, &samples).unwrap());
            if n <= 3 {
                ok(&q.verify_dirac_computes_fa(regions, &samples).unwrap());
            }
            if n >= 1 {
                ok(&q.verify_tpfa_chain_map(regions, &samples).unwrap());
            }
        }
        let half_pairs: Vec<_> = tuple_samples(&th, &stack[1..3], 10, 40).into_iter().map(|v| (v[0].clone(), v[1].clone())).collect();
        ok(&q.verify_dirac_half_powers(&stack[1], &stack[2], &half_pairs, 3).unwrap());

        let spacelike = [diamond(&th, 0, 0), diamond(&th, 0, 6)];
        let s = tuple_samples(&th, &spacelike, 5, 50);
        for v in &s {
            let a = q.fa_product_with(&spacelike, v, &[0, 1]).unwrap();
            let b = q.fa_product_with(&spacelike, v, &[1, 0]).unwrap();
            assert_eq!(a, b);
        }
        eprintln!("{}: {:?}", th.model.name, t0.elapsed());
    }
}

#[test]
fn symmetric_power_homotopies() {
    for th in models(7) {
        let t0 = Instant::now();
        let l = *th.lattice();
        let slab = l.slab(-3, 4).unwrap();
        let qi = cauchy_quasi_inverse(&th, &slab, make_cutoff(0)).unwrap();
        let q = Quantization::new(&th).unwrap();
        let h = SymPowerHomotopy { e: qi.g.clone(), h: qi.eta.clone(), q: q.q.clone() };
        let z = SymPowerHomotopy { e: qi.g.clone(), h: qi.zeta.clone(), q: q.q.clone() };
        let window = th.model.delta_basis(th.model.window_points(-1..=2, 0..=l.sites - 1).iter());
        let mut r = rng(4);
        for p in 0..=3usize {
            let words: Vec<Word<Site>> = (0..4)
                .filter_map(|_| random_word(&mut r, &window, p).keys().next().cloned())
                .collect();
            ok(&h.verify(&format!("Sym^{p} ambient"), &words));
            ok(&z.verify(&format!("Sym^{p} region"), &words));
        }
        eprintln!("{}: {:?}", th.model.name, t0.elapsed());
    }
}
