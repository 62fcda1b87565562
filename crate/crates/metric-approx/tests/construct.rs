use metric_approx::certify::verify_d;
use metric_approx::construct::*;
use metric_approx::groups::{ball, Elem, Group, Quotient, SubgroupPair};
use metric_approx::targets::{Dimension, Dist, Family, FieldKind, Perm, Target};
use metric_approx::Error;
use num_rational::Ratio;

fn z(x: i64) -> Elem {
    Elem::Int(vec![x])
}

#[test]
fn cyclic_small_radii() {
    for (n, k) in [(1, 3), (10, 21)] {
        let b = cyclic_z(n).unwrap();
        assert_eq!(b.certificate.dimension, Dimension::Exact(k));
        assert_eq!(b.report.defect, Dist::zero());
        assert_eq!(b.report.separation, Some(Dist::one()));
    }
    let b = cyclic_z(4).unwrap();
    assert_eq!(b.certificate.get(&z(0)), Some(&Target::Perm(Perm::identity(9))));
}


fn interval(lo: i64, len: i64) -> Vec<Elem> {
    (lo..lo + len).map(z).collect()
}

#[test]
fn quotient_of_z_matches_cyclic() {
    for n in 1..=4 {
        let q = from_quotient(&Group::z(), &Quotient::cyclic(2 * n as i64 + 1), n, Family::Sofic).unwrap();
        let c = cyclic_z(n).unwrap();
        assert_eq!(q.certificate.elements, c.certificate.elements);
        assert_eq!(q.certificate.targets, c.certificate.targets);
    }
}

#[test]
fn quotient_of_z2_by_scalar_lattice() {
    let b = from_quotient(&Group::FreeAbelian(2), &Quotient::scalar_lattice(2, 5), 2, Family::Sofic).unwrap();
    assert_eq!(b.certificate.dimension, Dimension::Exact(25));
    assert_eq!(b.report.defect, Dist::zero());
}

#[test]
fn quotient_kernel_meeting_the_ball_is_rejected() {
    for n in 1..=5usize {
        match from_quotient(&Group::z(), &Quotient::cyclic(n as i64), n, Family::Sofic) {
            Err(Error::KernelMeetsBall(w)) => assert!(w == format!("{}", n) || w == format!("-{}", n), "{w}"),
            other => panic!("expected rejection, got {other:?}"),
        }
    }
}

#[test]
fn quotient_in_other_families() {
    let g = Group::z();
    let q = Quotient::cyclic(7);
    for fam in [Family::Hyp, Family::Lin(FieldKind::Fp(2)), Family::Lin(FieldKind::Q), Family::Fin, Family::Trivial] {
        let b = from_quotient(&g, &q, 3, fam.clone()).unwrap();
        assert_eq!(b.certificate.dimension, Dimension::Exact(7), "{fam}");
    }
}

#[test]
fn folner_interval_gives_sofic_certificate() {
    let n = 2;
    let w = FolnerWitness::new(Group::z(), 2 * n, interval(0, 2 * 16 * 5), None).unwrap();
    assert!(w.is_valid().unwrap());
    let b = folner_to_sofic(&w, n).unwrap();
    assert_eq!(b.certificate.dimension, Dimension::Exact(160));
    assert_eq!(b.certificate.get(&z(0)), Some(&Target::Perm(Perm::identity(160))));
    // each triple is dominated by the Følner defect
    let c = &b.certificate;
    let g = &c.group;
    for x in &c.elements {
        for y in &c.elements {
            if let Some(t) = c.get(&g.mul(x, y)) {
                let d = c.family.distance(&c.image(x).mul(&c.image(y)).unwrap(), t).unwrap();
                assert!(d.value() <= *w.defect.numer() as f64 / *w.defect.denom() as f64);
            }
        }
    }
}

#[test]
fn folner_rejects_degenerate_input() {
    assert!(FolnerWitness::new(Group::z(), 0, interval(0, 3), None).is_err());
    assert!(FolnerWitness::new(Group::z(), 1, vec![], None).is_err());
    let w = FolnerWitness::new(Group::z(), 1, interval(0, 3), None).unwrap();
    assert_eq!(w.defect, Ratio::new(4, 3));
    assert!(!w.is_valid().unwrap());
    assert!(folner_to_sofic(&w, 1).is_err());
}

#[test]
fn folner_heisenberg_ball() {
    let h = Group::Heisenberg(1);
    let b16 = ball(&h, 16).unwrap();
    assert_eq!(b16.len(), 27905);
    let w = FolnerWitness::new(h, 1, b16.elements.clone(), None).unwrap();
    assert!(w.is_valid().unwrap());
    let b = folner_to_sofic(&w, 1).unwrap();
    assert!(b.report.pass);
    let trace = b.certificate.provenance.unwrap();
    assert_eq!(trace.params["theorem_radius_met"], false);
}

#[test]
fn induction_from_even_integers() {
    let pair = SubgroupPair::Scaled { d: 1, m: 2 };
    for n in 1..=3 {
        let ch = cyclic_z(n).unwrap().certificate;
        let m = 2 * n as u64 + 1;
        let b = induce_finite_index(&pair, &ch, n).unwrap();
        assert_eq!(b.certificate.dimension, Dimension::Exact(2 * m));
        assert_eq!(b.certificate.get(&z(0)), Some(&Target::Perm(Perm::identity(2 * m as usize))));
    }
}

#[test]
fn induction_in_linear_family() {
    let pair = SubgroupPair::Scaled { d: 1, m: 2 };
    let ch = from_quotient(&Group::z(), &Quotient::cyclic(5), 2, Family::Lin(FieldKind::Q)).unwrap().certificate;
    let b = induce_finite_index(&pair, &ch, 2).unwrap();
    assert_eq!(b.certificate.dimension, Dimension::Exact(10));
}

#[test]
fn cocycle_identities_on_samples() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
    for m in [2i64, 3] {
        let pair = SubgroupPair::Scaled { d: 1, m };
        let g = Group::z();
        for _ in 0..1000 {
            let (x, y) = (z(rng.gen_range(-50..=50)), z(rng.gen_range(-50..=50)));
            let (ax, ay, axy) =
                (coset_action(&pair, &x).unwrap(), coset_action(&pair, &y).unwrap(), coset_action(&pair, &g.mul(&x, &y)).unwrap());
            assert_eq!(axy.alpha, ax.alpha.compose(&ay.alpha));
            for i in 0..m as usize {
                assert_eq!(axy.cocycle[i], g.mul(&ax.cocycle[ay.alpha.apply(i)], &ay.cocycle[i]));
            }
        }
    }
}

#[test]
fn direct_product_of_cyclic_certificates() {
    let c = cyclic_z(3).unwrap().certificate;
    let b = direct_product(&c, &c).unwrap();
    assert_eq!(b.certificate.dimension, Dimension::Exact(49));
    let e = Elem::Pair(Box::new(z(0)), Box::new(z(0)));
    assert_eq!(b.certificate.get(&e), Some(&Target::Perm(Perm::identity(49))));
    let lin = from_quotient(&Group::z(), &Quotient::cyclic(5), 2, Family::Lin(FieldKind::Fp(3))).unwrap().certificate;
    assert!(matches!(direct_product(&c, &lin), Err(Error::FamilyMismatch(_))));
    assert!(direct_product(&lin, &lin).unwrap().report.pass);
}

#[test]
fn permutation_pipelines() {
    let n = 2;
    let sofic = cyclic_z(2 * n * n).unwrap().certificate;
    let hyp = perm_to_hyp(&sofic, n).unwrap();
    assert_eq!(hyp.certificate.family, Family::Hyp);
    assert_eq!(hyp.certificate.dimension, Dimension::Exact(17));
    // the hyp separation is sqrt(2 * Hamming separation)
    let ham = verify_d(&sofic.restrict(n).unwrap()).unwrap().separation.unwrap().value();
    assert!((hyp.report.separation.unwrap().value() - (2.0 * ham).sqrt()).abs() < 1e-9);
    assert!(matches!(perm_to_hyp(&cyclic_z(7).unwrap().certificate, n), Err(Error::Upstream(_))));

    let small = cyclic_z(n).unwrap().certificate;
    for f in [FieldKind::Fp(2), FieldKind::Q] {
        let lin = perm_to_lin(&small, n, f).unwrap();
        assert!(lin.report.pass);
        assert_eq!(lin.certificate.epsilon, Dist::ratio(1, 4));
    }
}

#[test]
fn amplification_power_matches_direct_search() {
    // smallest l with (5/4)^l >= 1/delta
    for n in 8..=40usize {
        let nf = n as f64;
        let delta = 2f64.sqrt() / (20.0 * nf) - 1.0 / (200.0 * nf * nf);
        let mut l = 0u32;
        while 1.25f64.powi(l as i32) * delta < 1.0 {
            l += 1;
        }
        assert_eq!(amplification_power(n).unwrap(), l, "n = {n}");
    }
    assert_eq!(amplification_power(8).unwrap(), 22);
    assert!(amplification_power(7).is_err());
}

#[test]
fn amplified_regular_representation() {
    let base = from_quotient(&Group::z(), &Quotient::cyclic(641), 320, Family::Hyp).unwrap().certificate;
    let b = amplify_projective(&base, 8).unwrap();
    assert!(b.report.pass);
    assert_eq!(b.certificate.dimension, Dimension::Power { base: 1282, power: 22 });
    match b.certificate.get(&z(0)).unwrap() {
        Target::Tensor(t) => assert!((t.tau().re - 1.0).abs() < 1e-12 && t.tau().im.abs() < 1e-12),
        other => panic!("{other:?}"),
    }
    assert!(amplify_projective(&base, 9).is_err());
}

#[test]
fn wreath_by_residually_finite_top() {
    let c2 = regular_representation(&Group::FiniteCyclic(2), 1, Family::Sofic).unwrap().certificate;
    let b = wreath_by_rf(&c2, &Group::z(), &Quotient::cyclic(5), 1).unwrap();
    assert_eq!(b.certificate.dimension, Dimension::Exact(160));
    assert!(b.report.pass);
    let g = &b.certificate.group;
    let Target::Wreath(e) = b.certificate.get(&g.identity()).unwrap() else { panic!() };
    assert_eq!(e.top, e.top_group.identity);
    assert!(e.base.iter().all(|t| *t == Target::Perm(Perm::identity(2))));
    // the lamp at the origin lands on the coset of 0, which is index 0
    let lamp = g.free_generators()[0].clone();
    let Target::Wreath(w) = b.certificate.get(&lamp).unwrap() else { panic!() };
    assert_eq!(w.base[0], Target::Perm(Perm(vec![1, 0])));
    assert!(w.base[1..].iter().all(|t| *t == Target::Perm(Perm::identity(2))));
    assert!(matches!(wreath_by_rf(&c2, &Group::z(), &Quotient::cyclic(4), 1), Err(Error::KernelMeetsBall(_))));
}

#[test]
fn wreath_lemma_bullets() {
    let cg = cyclic_z(1).unwrap().certificate;
    let ch = regular_representation(&Group::FiniteCyclic(2), 4, Family::Sofic).unwrap().certificate;
    let (b, rep) = wreath_sofic(&cg, &ch, 1, DEFAULT_MATERIALIZE_CAP).unwrap();
    assert_eq!(b.certificate.dimension, Dimension::Exact(18));
    assert!(rep.bullets_pass, "{rep:?}");
    assert!(rep.thresholds_pass, "{rep:?}");
    assert_eq!(rep.split_defect, Dist::zero());
    assert_eq!(rep.shift_defect, Dist::zero());
    let g = &b.certificate.group;
    assert_eq!(b.certificate.get(&g.identity()), Some(&Target::Perm(Perm::identity(18))));
}

#[test]
fn wreath_lemma_unitary_analogue() {
    let cg = from_quotient(&Group::z(), &Quotient::cyclic(3), 1, Family::Hyp).unwrap().certificate;
    let ch = regular_representation(&Group::FiniteCyclic(2), 4, Family::Hyp).unwrap().certificate;
    let (b, rep) = wreath_sofic(&cg, &ch, 1, DEFAULT_MATERIALIZE_CAP).unwrap();
    assert_eq!(b.certificate.dimension, Dimension::Exact(18));
    assert!(rep.bullets_pass);
    assert!(matches!(wreath_sofic(&cg, &ch, 1, 10), Err(Error::Overflow { .. })));
}

#[test]
fn extension_of_z_by_z() {
    let q = AmenableQuotient::new(SubgroupPair::Axis { d: 2, axis: 0 }).unwrap();
    let w = FolnerWitness::new(Group::z(), 10, interval(0, 2200), Some(2200)).unwrap();
    assert!(w.is_valid().unwrap());
    let cn = cyclic_z(2).unwrap().certificate;
    let b = extend_by_amenable(&cn, &q, &w, 1).unwrap();
    assert!(b.report.pass);
    assert_eq!(b.certificate.dimension, Dimension::Exact(2200 * 5));
    let g = &b.certificate.group;
    let Target::PermWreath(x) = b.certificate.get(&Elem::Int(vec![1, 0])).unwrap() else { panic!() };
    assert!(x.sigma.is_identity());
    let Target::PermWreath(e) = b.certificate.get(&g.identity()).unwrap() else { panic!() };
    assert!(e.sigma.is_identity() && e.bell.iter().all(|t| *t == Target::Perm(Perm::identity(5))));
}
