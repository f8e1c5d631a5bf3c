use proptest::prelude::*;

use spinstrata::curve_system::{build_prototype, CurveName};
use spinstrata::origami_core::{cylinders, CylDirection, Cylinder, Origami};
use spinstrata::spin_algebra::Spin;
use spinstrata::winding::*;

fn kappas() -> Vec<(Vec<usize>, Option<Spin>)> {
    vec![
        (vec![2, 2, 2], Some(Spin::Even)),
        (vec![2, 2, 2], Some(Spin::Odd)),
        (vec![3, 3], None),
        (vec![1, 2, 3], None),
        (vec![4, 4], Some(Spin::Odd)),
        (vec![6], Some(Spin::Even)),
    ]
}

fn height_one(o: &Origami) -> Vec<Cylinder> {
    let mut all = cylinders(o, CylDirection::Horizontal);
    all.extend(cylinders(o, CylDirection::Vertical));
    all.retain(|c| c.height == 1);
    all
}

#[test]
fn loops_around_vertices() {
    assert_eq!(turning_number(&Origami::torus(), &vertex_loop(&Origami::torus(), 0)).unwrap(), 1);
    let l = Origami::l_shape();
    for q in 0..3 {
        assert_eq!(turning_number(&l, &vertex_loop(&l, q)).unwrap(), 3);
    }
}

#[test]
fn reversal_negates_winding() {
    let p = build_prototype(&[3, 3], None).unwrap();
    for path in p.basis_paths() {
        let w = turning_number(&p.origami, &path).unwrap();
        assert_eq!(turning_number(&p.origami, &path.reversed()).unwrap(), -w);
    }
}

#[test]
fn mod_r_needs_a_divisor_of_every_zero() {
    let l = Origami::l_shape();
    let core = cylinder_core(&cylinders(&l, CylDirection::Horizontal)[0]);
    assert_eq!(wn_mod_r(&l, &core, 2).unwrap(), 0);
    assert_eq!(wn_mod_r(&l, &core, 3).unwrap_err().kind(), "invalid-input");
    assert_eq!(wn_mod_r(&l, &core, 0).unwrap_err().kind(), "invalid-input");
}

#[test]
fn twisting_a_core_along_itself_is_refused() {
    let p = build_prototype(&[2, 2], Some(Spin::Even)).unwrap();
    let c = p.cylinder(CurveName::A(1)).unwrap();
    assert!(c.height != 1 || twist_path(&p.origami, &cylinder_core(c), c).is_err());
}

#[test]
fn coherence_on_boundary_families() {
    for (kappa, spin) in kappas() {
        let p = build_prototype(&kappa, spin).unwrap();
        for (names, paths, chi) in p.coherence_families().unwrap() {
            assert!(coherence_check(&p.origami, &paths, chi, p.r()).unwrap(), "{kappa:?} {names:?}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn twist_linearity(k in 0usize..6, start in 0usize..64, twists in proptest::collection::vec(0usize..64, 0..3), last in 0usize..64) {
        let (kappa, spin) = &kappas()[k];
        let p = build_prototype(kappa, *spin).unwrap();
        let o = &p.origami;
        let cyls = height_one(o);
        let basis = p.basis_paths();
        let mut path = basis[start % basis.len()].clone();
        for t in twists {
            if let Ok(next) = twist_path(o, &path, &cyls[t % cyls.len()]) {
                path = next;
            }
        }
        let c = &cyls[last % cyls.len()];
        if let Ok(ok) = twist_linearity_check(o, &path, c, p.r()) {
            prop_assert!(ok);
        }
    }

    #[test]
    fn twisted_paths_stay_closed(k in 0usize..6, start in 0usize..64, t in 0usize..64) {
        let (kappa, spin) = &kappas()[k];
        let p = build_prototype(kappa, *spin).unwrap();
        let cyls = height_one(&p.origami);
        let basis = p.basis_paths();
        if let Ok(q) = twist_path(&p.origami, &basis[start % basis.len()], &cyls[t % cyls.len()]) {
            prop_assert!(q.validate(&p.origami).is_ok());
        }
    }
}
