use std::sync::Arc;

use lattice_bv::bvtheory::{FreeBVModel, PairingKind, Site, Theory};
use lattice_bv::complexes::{LinComb, LinMap};
use lattice_bv::lattice::{Lattice, Point};
use lattice_bv::sampling::rng;
use lattice_bv::scalar::rat;
use lattice_bv::symalg::{
    check_bider_naturality, check_laplacian_oracle, check_naturality, random_element, sym_map, Laplacian, SymElement,
};

fn theory() -> Arc<Theory> {
    Theory::new(FreeBVModel::maxwell2d(Lattice::new(13, 1).unwrap())).unwrap()
}

fn translation(th: &Arc<Theory>, dt: i64, dx: i64) -> LinMap<Site, Site> {
    let l = *th.lattice();
    LinMap::new(0, move |s: &Site| LinComb::basis(Site { t: s.t + dt, x: l.wrap(s.x + dx), ..*s }))
}

#[test]
fn sym_of_identity_is_identity() {
    let th = theory();
    let pool = th.model.delta_basis(th.model.window_points(0..=1, 0..=1).iter());
    let mut r = rng(9);
    let id = LinMap::identity();
    for _ in 0..20 {
        let a = random_element(&mut r, &pool, 4, 3);
        assert_eq!(sym_map(&id, &a), a);
    }
}

#[test]
fn pairings_are_natural_under_inclusion_and_translation() {
    let th = theory();
    let d = th.lattice().causal_hull(&[Point { t: 0, x: 0 }, Point { t: 2, x: 0 }]).unwrap();
    let pool = th.model.delta_basis(d.points().unwrap().iter());
    let mut r = rng(10);
    let pairs: Vec<_> = (0..25).map(|_| (random_element(&mut r, &pool, 3, 2), random_element(&mut r, &pool, 3, 2))).collect();
    for f in [LinMap::identity(), translation(&th, 3, 4)] {
        for kind in [PairingKind::MinusOne, PairingKind::Zero, PairingKind::Dirac] {
            let tau = th.oracle(kind);
            let rep = check_bider_naturality(&f, &tau, &tau, &pairs);
            assert!(rep.passed(), "{kind:?}: {}", rep.summary());
        }
        for kind in [PairingKind::MinusOne, PairingKind::Dirac] {
            let lap = Laplacian::new(th.oracle(kind)).unwrap();
            let rep = check_naturality(&f, &lap, &lap, &pairs);
            assert!(rep.passed(), "{kind:?}: {}", rep.summary());
        }
    }
}

#[test]
fn model_laplacians_match_recursion() {
    let th = theory();
    let pool = th.model.delta_basis(th.model.window_points(0..=2, 0..=1).iter());
    let mut r = rng(12);
    let samples: Vec<SymElement<Site>> = (0..40).map(|_| random_element(&mut r, &pool, 5, 2)).collect();
    for kind in [PairingKind::MinusOne, PairingKind::Dirac] {
        let lap = Laplacian::new(th.oracle(kind)).unwrap();
        assert!(check_laplacian_oracle(&lap, &samples).passed());
    }
    assert!(Laplacian::new(th.oracle(PairingKind::Zero)).is_err());
    let _ = rat(1, 1);
}
