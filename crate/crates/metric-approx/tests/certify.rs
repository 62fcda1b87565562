use metric_approx::certify::*;
use metric_approx::construct::cyclic_z;
use metric_approx::groups::{Elem, Group};
use metric_approx::targets::{Dist, Family, Perm, Target, Unitary};
use metric_approx::Error;

fn z(x: i64) -> Elem {
    Elem::Int(vec![x])
}

#[test]
fn constant_map_is_not_injective() {
    let c = ApproxCertificate::build(Group::z(), Family::Sofic, 2, |_| Ok(Target::Perm(Perm::identity(3)))).unwrap();
    let r = verify_d(&c).unwrap();
    assert_eq!(r.defect, Dist::zero());
    assert_eq!(r.separation, Some(Dist::zero()));
    assert!(!r.pass);
}

#[test]
fn reduction_mod_n_collides_at_radius_n() {
    for n in 2..=6usize {
        let c = ApproxCertificate::build(Group::z(), Family::Sofic, n, |g| match g {
            Elem::Int(v) => Ok(Target::Perm(Perm::shift(n, v[0]))),
            _ => unreachable!(),
        })
        .unwrap();
        let r = verify_d(&c).unwrap();
        assert_eq!(r.defect, Dist::zero());
        assert!(!r.pass);
        assert_eq!(r.separation, Some(Dist::zero()));
    }
}

#[test]
fn general_and_fast_paths_agree() {
    // the unitary family runs the general sweep on the same permutations
    let c = cyclic_z(5).unwrap().certificate;
    let mut bad = c.clone();
    let i = bad.elements.iter().position(|g| *g == z(2)).unwrap();
    bad.targets[i] = Target::Perm(Perm::shift(11, 3));
    let fast = verify_d(&bad).unwrap();
    let hyp = bad
        .map_targets(Family::Hyp, |t| match t {
            Target::Perm(p) => Ok(Target::Unitary(Unitary::from_perm(p))),
            _ => unreachable!(),
        })
        .unwrap();
    let slow = verify_d(&hyp).unwrap();
    assert!(!fast.pass && !slow.pass);
    assert_eq!(fast.defect_witness, slow.defect_witness);
    assert_eq!(fast.separation_witness, slow.separation_witness);
    assert!((slow.defect.value() - (2.0 * fast.defect.value()).sqrt()).abs() < 1e-9);
    assert_eq!(fast.checked_defect, slow.checked_defect);
}

#[test]
fn swapped_assignment_is_caught() {
    let c = cyclic_z(3).unwrap().certificate;
    let mut bad = c.clone();
    bad.targets.swap(1, 2);
    let r = verify_d(&bad).unwrap();
    assert!(!r.pass);
    assert!(!r.defect_witness.is_empty());
}

#[test]
fn zero_radius_and_missing_elements_are_errors() {
    let c = cyclic_z(2).unwrap().certificate;
    let mut c0 = c.clone();
    c0.n = 0;
    assert!(verify_d(&c0).is_err());
    let mut big = c.clone();
    big.n = 3;
    assert!(matches!(verify_d(&big), Err(Error::MissingAssignment(_))));
}

#[test]
fn certificate_json_round_trip() {
    let c = cyclic_z(3).unwrap().certificate;
    let v = c.to_json();
    assert_eq!(v["family"], "sofic");
    assert_eq!(v["dimension"], 7);
    let back = ApproxCertificate::from_json(&v).unwrap();
    assert_eq!(back.targets, c.targets);
    assert_eq!(back.elements, c.elements);
    assert_eq!(back.provenance, c.provenance);
    assert!(verify_d(&back).unwrap().pass);
    let mut dup = v.clone();
    let first = dup["assignments"][0].clone();
    dup["assignments"].as_array_mut().unwrap().push(first);
    assert!(ApproxCertificate::from_json(&dup).is_err());
}

#[test]
fn word_and_ball_certificates_round_trip() {
    for m in 1..=3usize {
        let c = cyclic_z(3 * m * m).unwrap().certificate;
        let (h, rep) = w_from_d(&c, m).unwrap();
        assert!(rep.pass, "W at {m}");
        assert!(verify_r(&h, m, DEFAULT_WORD_CAP).unwrap().pass);
        let (back, rep) = d_from_w(&h, m).unwrap();
        assert!(rep.pass);
        assert_eq!(back.dimension, c.dimension);
    }
    let c = cyclic_z(2).unwrap().certificate;
    assert!(w_from_d(&c, 1).is_err());
}

#[test]
fn word_check_rejects_torsion_image() {
    // Z -> Z/3 kills the word x^3
    let h = HomCertificate::new(Group::z(), Family::Sofic, vec![Target::Perm(Perm::shift(3, 1))]).unwrap();
    let r = verify_w(&h, 3, DEFAULT_WORD_CAP).unwrap();
    assert!(!r.pass);
    assert_eq!(r.separation, Some(Dist::zero()));
    assert!(verify_w(&h, 2, DEFAULT_WORD_CAP).unwrap().pass);
    assert!(matches!(verify_w(&h, 30, 10), Err(Error::Overflow { .. })));
}

#[test]
fn relator_check_on_z2() {
    let g = Group::FreeAbelian(2);
    let a = Target::Perm(Perm::shift(5, 1).product_action(&Perm::identity(5)));
    let b = Target::Perm(Perm::identity(5).product_action(&Perm::shift(5, 1)));
    let h = HomCertificate::new(g, Family::Sofic, vec![a, b]).unwrap();
    let r = verify_r(&h, 4, DEFAULT_WORD_CAP).unwrap();
    assert_eq!(r.defect, Dist::zero());
    assert!(r.pass);
    assert_eq!(r.checked_defect, 2);
}

#[test]
fn cyclic_schreier_graph_is_locally_a_ball() {
    for n in 2..=5 {
        let c = cyclic_z(n).unwrap().certificate;
        let mut gc = graph_from_sofic(&c, Dist::ratio(1, 10)).unwrap();
        // the (2n+1)-cycle closes up on the boundary of B(n)
        let r = verify_graph(&gc, &Group::z()).unwrap();
        assert_eq!(r.good, 0);
        assert_eq!(r.first_bad, Some(0));
        gc.n = n - 1;
        let r = verify_graph(&gc, &Group::z()).unwrap();
        assert_eq!(r.good, 2 * n + 1);
        assert_eq!(r.good_fraction, 1.0);
        assert!(r.pass);
    }
}

#[test]
fn short_cycle_graph_fails() {
    let n = 3;
    let k = 2 * n;
    // a 2n-cycle cannot contain a copy of B(n), which has 2n + 1 vertices
    let edges: Vec<Vec<Option<u32>>> =
        (0..k).map(|i| vec![Some(((i + 1) % k) as u32), Some(((i + k - 1) % k) as u32)]).collect();
    let gc = GraphCertificate { edges: edges.clone(), n, delta: Dist::ratio(1, 2) };
    let r = verify_graph(&gc, &Group::z()).unwrap();
    assert_eq!(r.good, 0);
    assert!(!r.pass);
    let gc = GraphCertificate { edges, n, delta: Dist::one() };
    assert!(verify_graph(&gc, &Group::z()).unwrap().pass);
}

#[test]
fn commutator_of_transpositions() {
    let x = Target::Perm(Perm(vec![1, 0, 2]));
    let y = Target::Perm(Perm(vec![2, 1, 0]));
    let r = check_delta_solution(&Family::Sofic, &[vec![1, 2, -1, -2]], &[x.clone(), y.clone()], Dist::ratio(1, 2)).unwrap();
    assert_eq!(r.max_defect, Dist::one());
    assert!(!r.pass);
    let r = check_delta_solution(&Family::Sofic, &[vec![1, 1]], &[x.clone(), y.clone()], Dist::ratio(1, 100)).unwrap();
    assert_eq!(r.max_defect, Dist::zero());
    assert!(r.pass);
    assert!(check_delta_solution(&Family::Sofic, &[vec![3]], &[x, y], Dist::one()).is_err());
}

#[test]
fn lemma_suite_on_exact_and_perturbed_maps() {
    let c = cyclic_z(6).unwrap().certificate;
    let r = lemma_consistency_suite(&c, &LemmaConfig::default()).unwrap();
    assert_eq!(r.eps0, Dist::zero());
    assert!(r.pass);
    assert_eq!(r.bounds.len(), 5);

    // phase perturbation of the generator images: a known nonzero defect
    let hyp = c
        .map_targets(Family::Hyp, |t| match t {
            Target::Perm(p) => Ok(Target::Unitary(Unitary::from_perm(p))),
            _ => unreachable!(),
        })
        .unwrap();
    let mut pert = hyp.clone();
    for (g, t) in pert.elements.iter().zip(pert.targets.iter_mut()) {
        if *g == z(1) {
            let Target::Unitary(u) = t else { unreachable!() };
            let mut th = vec![0.0; 13];
            th[0] = 0.3;
            *t = Target::Unitary(Unitary::phases(&th).mul(u));
        }
    }
    let r = lemma_consistency_suite(&pert, &LemmaConfig::default()).unwrap();
    let injected = ((2.0 - 2.0 * 0.3f64.cos()) / 13.0).sqrt();
    assert!(r.eps0.value() >= injected - 1e-12);
    assert!(r.pass, "{r:?}");
}
