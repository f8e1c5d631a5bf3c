//! The ten acceptance criteria, each reported as one PASS/FAIL line.
//! Every comparison is exact.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use spinstrata::curve_system::{build_prototype, salter_conditions_check, LabelingCase, Prototype};
use spinstrata::euclid_engine::{aux_curve_c, euclidean_trace, shear_with_marking};
use spinstrata::framed_rep::*;
use spinstrata::origami_core::{are_isomorphic, cylinders, singularity_profile, CylDirection, Cylinder, Origami};
use spinstrata::spin_algebra::*;
use spinstrata::winding::*;

type Outcome = std::result::Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn spins_for(kappa: &[usize]) -> Vec<Option<Spin>> {
    if gcd_of(kappa) % 2 == 0 {
        vec![Some(Spin::Even), Some(Spin::Odd)]
    } else {
        vec![None]
    }
}

fn prototypes(genera: std::ops::RangeInclusive<usize>) -> Vec<(Vec<usize>, Option<Spin>, Prototype)> {
    let mut out = Vec::new();
    for g in genera {
        for mut kappa in partitions(2 * g - 2) {
            kappa.sort_unstable();
            for spin in spins_for(&kappa) {
                let p = build_prototype(&kappa, spin).unwrap_or_else(|e| panic!("{kappa:?} {spin:?}: {e}"));
                out.push((kappa.clone(), spin, p));
            }
        }
    }
    out
}

fn singularity_oracle() -> Outcome {
    ensure!(singularity_profile(&Origami::l_shape()) == vec![2], "L-origami");
    ensure!(singularity_profile(&Origami::torus()).is_empty(), "torus");
    Ok("L-origami [2], torus []".into())
}

fn prototype_sweep() -> Outcome {
    let mut n = 0;
    for (kappa, spin, p) in prototypes(4..=8) {
        ensure!(singularity_profile(&p.origami) == kappa, "{kappa:?} {spin:?}: profile");
        if let Some(s) = spin {
            let phi = spin_from_prototype(&p.origami, &p.basis_paths(), p.r()).map_err(|e| e.to_string())?;
            let arf = arf_of_spin(&phi).map_err(|e| e.to_string())?;
            ensure!(arf == s.bit(), "{kappa:?} {spin:?}: Arf {arf}");
        }
        n += 1;
    }
    Ok(format!("{n} prototypes"))
}

fn census_counts() -> Outcome {
    for (g, r) in [(2, 2), (3, 2), (3, 4), (4, 2), (4, 6), (5, 2), (5, 4)] {
        let c = census_threaded(r, g, DEFAULT_CAP, 4).map_err(|e| e.to_string())?;
        let half = (r / 2).pow(2 * g as u32);
        let even = half * (1 << (g - 1)) * ((1 << g) + 1);
        let odd = half * (1 << (g - 1)) * ((1 << g) - 1);
        ensure!(c.total == r.pow(2 * g as u32), "({g},{r}) total {}", c.total);
        ensure!(c.even == Some(even) && c.odd == Some(odd), "({g},{r}) split {:?}/{:?}", c.even, c.odd);
    }
    let c = census(2, 2, DEFAULT_CAP).unwrap();
    ensure!((c.total, c.even, c.odd) == (16, Some(10), Some(6)), "(2,2)");
    let c = census(4, 3, DEFAULT_CAP).unwrap();
    ensure!((c.total, c.even, c.odd) == (4096, Some(2304), Some(1792)), "(3,4)");
    Ok("7 cases".into())
}

fn orbits() -> Outcome {
    let mut rng = StdRng::seed_from_u64(11);
    for (g, r, want) in [(4, 3, vec![6561]), (4, 2, vec![136, 120]), (3, 4, vec![2304, 1792])] {
        let (_, gens) = humphries_generators(g, r).map_err(|e| e.to_string())?;
        let sizes = orbit_sizes(r, g, &gens, DEFAULT_ORBIT_CAP).map_err(|e| e.to_string())?;
        ensure!(sizes == want, "({g},{r}) sizes {sizes:?}");
        for _ in 0..2 {
            let start = SpinStructure::new(r, (0..2 * g).map(|_| rng.gen_range(0..r)).collect()).unwrap();
            let orbit = orbit_bfs(&start, &gens, DEFAULT_ORBIT_CAP).map_err(|e| e.to_string())?;
            ensure!(want.contains(&orbit.len()), "({g},{r}) random start gave {}", orbit.len());
        }
    }
    Ok("6561; 136/120; 2304/1792".into())
}

fn height_one(o: &Origami) -> Vec<Cylinder> {
    let mut all = cylinders(o, CylDirection::Horizontal);
    all.extend(cylinders(o, CylDirection::Vertical));
    all.retain(|c| c.height == 1);
    all
}

fn winding_properties() -> Outcome {
    let mut rng = StdRng::seed_from_u64(5);
    let mut pairs = 0;
    let mut families = 0;
    let mut crossed = 0;
    let list: Vec<_> = prototypes(4..=5);
    for (kappa, _, p) in &list {
        let o = &p.origami;
        let r = p.r();
        for dir in [CylDirection::Horizontal, CylDirection::Vertical] {
            for c in cylinders(o, dir) {
                ensure!(turning_number(o, &cylinder_core(&c)).unwrap() == 0, "{kappa:?}: core");
            }
        }
        let angles = o.corner_angles();
        for (q, &a) in angles.iter().enumerate() {
            let w = turning_number(o, &vertex_loop(o, q)).map_err(|e| e.to_string())?;
            ensure!(w == a as i64, "{kappa:?}: loop at square {q} has winding {w}, cone angle {a}");
        }

        let cyls = height_one(o);
        let basis = p.basis_paths();
        let mut done = 0;
        let mut crossing = 0;
        let mut attempts = 0;
        while done < 100 || crossing < 50 {
            attempts += 1;
            ensure!(attempts < 100_000, "{kappa:?}: only {done} usable pairs");
            let mut path = basis[rng.gen_range(0..basis.len())].clone();
            for _ in 0..rng.gen_range(0..3) {
                let c = &cyls[rng.gen_range(0..cyls.len())];
                if let Ok(next) = twist_path(o, &path, c) {
                    if next.len() <= 400 {
                        path = next;
                    }
                }
            }
            let c = &cyls[rng.gen_range(0..cyls.len())];
            match twist_linearity_check(o, &path, c, r) {
                Ok(true) => {
                    done += 1;
                    if algebraic_intersection(o, c, &path) != 0 {
                        crossing += 1;
                    }
                }
                Ok(false) => return Err(format!("{kappa:?}: twist linearity fails")),
                Err(_) => {}
            }
        }
        ensure!(crossing >= 50, "{kappa:?}: only {crossing} pairs cross their cylinder");
        pairs += done;
        crossed += crossing;
    }
    for (kappa, _, p) in prototypes(4..=8) {
        for (names, paths, chi) in p.coherence_families().map_err(|e| e.to_string())? {
            ensure!(coherence_check(&p.origami, &paths, chi, p.r()).unwrap(), "{kappa:?}: coherence on {names:?}");
            families += 1;
        }
    }
    // The loop around the regular vertex of the torus is a counterclockwise quadrilateral.
    let t = Origami::torus();
    ensure!(turning_number(&t, &vertex_loop(&t, 0)).map_err(|e| e.to_string())? == 1, "quadrilateral");
    Ok(format!("{} prototypes, {pairs} twist pairs ({crossed} crossing), {families} boundary families", list.len()))
}

fn shear_realization() -> Outcome {
    let mut n = 0;
    for (kappa, spin, p) in prototypes(4..=6) {
        let r = p.r();
        let a = Alphabet::new(&p, r).map_err(|e| e.to_string())?;
        let phi = p.spin_structure(r).map_err(|e| e.to_string())?;
        for (name, _) in &p.cylinders {
            let (s, marking) = shear_with_marking(&p, *name).map_err(|e| format!("{kappa:?} {name}: {e}"))?;
            ensure!(are_isomorphic(&p.origami, &s.origami).is_some(), "{kappa:?} {spin:?} {name}: not isomorphic");
            ensure!(a.pullback_word(&phi, &marking).unwrap() == phi, "{kappa:?} {spin:?} {name}: spin moved");
            n += 1;
        }
    }
    Ok(format!("{n} cylinders"))
}

fn euclidean_engine() -> Outcome {
    let t = euclidean_trace(&[5, 7], None).map_err(|e| e.to_string())?;
    let s = &t.stages[0];
    ensure!(s.quotients() == vec![1, 2, 2] && s.remainders() == vec![2, 1, 0], "(5,7) stage table");
    ensure!(
        euclidean_trace(&[3, 6, 6], Some(Spin::Even)).is_err(),
        "(3,6,6) is not a partition of an even number and must be rejected"
    );
    let cases: Vec<(Vec<usize>, Option<Spin>)> = vec![
        (vec![5, 7], None),
        (vec![2, 4], Some(Spin::Even)),
        (vec![2, 4], Some(Spin::Odd)),
        (vec![2, 6, 6], Some(Spin::Even)),
        (vec![2, 6, 6], Some(Spin::Odd)),
        (vec![3, 9], None),
        (vec![4, 6], Some(Spin::Odd)),
        (vec![1, 1, 4], None),
    ];
    let mut words = 0;
    for (kappa, spin) in &cases {
        let t = euclidean_trace(kappa, *spin).map_err(|e| format!("{kappa:?}: {e}"))?;
        let last = t.stages.last().map(|s| s.r_next).unwrap_or(t.r);
        ensure!(last == gcd_of(kappa), "{kappa:?}: R_N = {last}");
        ensure!(t.stages.iter().all(|s| s.steps.iter().all(|x| x.holds)), "{kappa:?}: remainder identity");
        ensure!(t.all_verified, "{kappa:?}: unverified certificate");
        ensure!(t.certificates.iter().all(|c| c.verdict.passed()), "{kappa:?}: verdict");
        words += t.certificates.len();
    }
    Ok(format!("{} traces, {words} certificates; (2,6,6) stands in for (3,6,6)", cases.len()))
}

fn salter() -> Outcome {
    let mut n = 0;
    for g in 5..=8usize {
        for r in 1..=3usize {
            if (2 * g - 2) % r != 0 {
                continue;
            }
            let kappa = vec![r; (2 * g - 2) / r];
            for spin in spins_for(&kappa) {
                let p = build_prototype(&kappa, spin).unwrap();
                let phi = p.spin_structure(r as u64).unwrap();
                let extra = match p.labeling() {
                    LabelingCase::OneTwo => vec![aux_curve_c(&p).map_err(|e| e.to_string())?],
                    LabelingCase::Three => vec![],
                };
                let rep = salter_conditions_check(&p, &phi, &extra).map_err(|e| e.to_string())?;
                ensure!(rep.passed, "g={g} r={r} {spin:?}: {:?}", rep.conditions.iter().filter(|c| !c.passed).collect::<Vec<_>>());
                n += 1;
            }
        }
    }
    for (kappa, spin) in [(vec![2, 2, 2], Some(Spin::Even)), (vec![3, 3], None), (vec![4, 4], Some(Spin::Odd)), (vec![6, 6], Some(Spin::Odd))] {
        let p = build_prototype(&kappa, spin).unwrap();
        let phi = p.spin_structure(p.r()).unwrap();
        ensure!(salter_conditions_check(&p, &phi, &[]).is_err(), "{kappa:?}: guard");
        ensure!(aux_curve_c(&p).is_err(), "{kappa:?}: aux guard");
    }
    Ok(format!("{n} strata"))
}

fn symplectic_checks() -> Outcome {
    let mut odd = 0;
    let mut even = 0;
    for (kappa, _, p) in prototypes(5..=5) {
        let r = p.r();
        let a = Alphabet::new(&p, r).unwrap();
        let gens = mod2_classes(p.system.curves.iter().map(|&c| a.get(c).unwrap()));
        let mut e1 = vec![0u8; 10];
        e1[0] = 1;
        let orbit = mod2_orbit(&gens, &e1);
        if r % 2 == 1 {
            ensure!(orbit.len() == 1023, "{kappa:?}: orbit {}", orbit.len());
            odd += 1;
        } else {
            let q = QuadraticForm::from_spin(&reduce_spin(&p.spin_structure(r).unwrap(), 2).unwrap()).unwrap();
            for &c in &p.system.curves {
                let m = a.symplectic_of::<i64>(&spinstrata::euclid_engine::TwistWord::letter(c, 1)).unwrap().mod2();
                ensure!(preserves_quadratic_form(&m, &q), "{kappa:?}: {c} moves q");
            }
            ensure!(orbit == level_set(&q, q.eval(&e1)), "{kappa:?}: orbit is not the level set");
            even += 1;
        }
    }
    Ok(format!("{odd} odd-r transitive, {even} even-r level sets"))
}

fn component_counts() -> Outcome {
    let (mut ok, mut excluded) = (0, 0);
    for g in 4..=5usize {
        for kappa in partitions(2 * g - 2) {
            let r = gcd_of(&kappa);
            let res = component_census(&kappa, g, DEFAULT_CAP);
            if r == 2 * g as u64 - 2 || r == g as u64 - 1 {
                let kind = res.err().map(|e| e.kind());
                ensure!(kind == Some("unsupported"), "{kappa:?}: expected unsupported, got {kind:?}");
                excluded += 1;
                continue;
            }
            let cc = res.map_err(|e| format!("{kappa:?}: {e}"))?;
            let c = census(r, g, DEFAULT_CAP).unwrap();
            ensure!(cc.components == c.total && cc.even == c.even && cc.odd == c.odd, "{kappa:?}: counts");
            ensure!(cc.agrees_with_census, "{kappa:?}: flag");
            ok += 1;
        }
    }
    Ok(format!("{ok} strata counted, {excluded} excluded"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome, Duration); 10] = [
        ("singularity oracle", singularity_oracle, Duration::from_millis(1)),
        ("prototype sweep", prototype_sweep, Duration::from_secs(60)),
        ("census", census_counts, Duration::from_secs(10)),
        ("orbits", orbits, Duration::from_secs(30)),
        ("winding properties", winding_properties, Duration::from_secs(10)),
        ("shear realization", shear_realization, Duration::from_secs(30)),
        ("euclidean engine", euclidean_engine, Duration::from_secs(60)),
        ("salter hypotheses", salter, Duration::from_secs(10)),
        ("symplectic checks", symplectic_checks, Duration::from_secs(60)),
        ("component census", component_counts, Duration::from_secs(5)),
    ];
    std::panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (k, (name, run, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            Err(e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
        });
        let took = start.elapsed();
        let verdict = if outcome.is_ok() { "PASS" } else { "FAIL" };
        if outcome.is_err() {
            failed += 1;
        }
        let detail = outcome.unwrap_or_else(|e| e);
        let note = if took > *budget { format!(" (over budget {budget:?})") } else { String::new() };
        println!("{verdict} {:>2} {name}: {detail} [{took:.2?}]{note}", k + 1);
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
