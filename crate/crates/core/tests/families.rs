use trielim::*;

fn cg(name: &str) -> CgIneq {
    match catalog(name).unwrap() {
        Inequality::Cg(c) => c,
        Inequality::Cut(c) => convert_cut_to_cg(&triangular_eliminate(&c).unwrap()).unwrap(),
    }
}

fn pipeline(b: &WeightVector) -> CgIneq {
    convert_cut_to_cg(&triangular_eliminate(&hypermetric(b).unwrap()).unwrap()).unwrap()
}

/// All weight vectors with the given side lengths and entries in `values`.
fn weights(s: usize, t: usize, values: &[i64]) -> Vec<WeightVector> {
    let n = s + t;
    let mut out = Vec::new();
    let mut idx = vec![0usize; n];
    loop {
        let w: Vec<i64> = idx.iter().map(|&k| values[k]).collect();
        out.push(WeightVector::new(w[..s].to_vec(), w[s..].to_vec()));
        let mut p = 0;
        while p < n {
            idx[p] += 1;
            if idx[p] < values.len() {
                break;
            }
            idx[p] = 0;
            p += 1;
        }
        if p == n {
            return out;
        }
    }
}

#[test]
fn closed_form_matches_elimination_pipeline() {
    let mut checked = 0;
    for s in 0..=3 {
        for t in 0..=3 {
            if s + t == 0 {
                continue;
            }
            for b in weights(s, t, &[-2, -1, 1, 2]) {
                let direct = hypermetric_bell(&b).unwrap().normalized();
                let via = pipeline(&b).normalized();
                assert_eq!(direct, via, "weights {b:?}");
                checked += 1;
            }
        }
    }
    assert!(checked > 5000);
}

#[test]
fn pure_cases() {
    let chsh = cg("chsh").to_cut();
    let p112 = pure_hypermetric_bell(1, 1, 2).unwrap();
    assert!(equivalent(&p112.to_cut(), &chsh, GroupMode::Party).is_some());
    assert_eq!(pure_hypermetric_bell(2, 2, 2).unwrap().normalized(), pipeline(&WeightVector::new(vec![1, 1], vec![-1, -1])).normalized());
    let p213 = pure_hypermetric_bell(2, 1, 3).unwrap();
    assert_eq!(p213.normalized(), pipeline(&WeightVector::new(vec![1], vec![1, -1, -1])).normalized());
    assert!(equivalent(&p213.to_cut(), &cg("i3422_2").to_cut(), GroupMode::Party).is_some());
    let trivial = pure_hypermetric_bell(1, 1, 1).unwrap();
    let r = tightness_report(&trivial.to_cut()).unwrap();
    assert!(r.valid && r.is_facet);
    assert!(pure_hypermetric_bell(2, 3, 1).is_err());
}

#[test]
fn pure_hypermetric_matches_weights() {
    for l in 1..=3 {
        for s in 0..=l {
            let t = 2 * l - s;
            let mut bob = vec![1; l - s];
            bob.extend(vec![-1; t - (l - s)]);
            let b = WeightVector::new(vec![1; s], bob);
            assert_eq!(b.x(), 1);
            assert_eq!(pure_hypermetric_bell(l, s, t).unwrap().normalized(), hypermetric_bell(&b).unwrap().normalized());
        }
    }
}

#[test]
fn sufficient_conditions_give_facets() {
    let mut facets = 0;
    for s in 0..=3 {
        for t in 0..=3 {
            for b in weights(s, t, &[-1, 0, 1, 2]) {
                if hypermetric_tightness_condition(&b) == TightnessCondition::None || s + t > 6 {
                    continue;
                }
                let ineq = hypermetric_bell(&b).unwrap().to_cut();
                let r = tightness_report(&ineq).unwrap();
                assert!(r.valid && r.is_facet, "weights {b:?}: {r:?}");
                facets += 1;
            }
        }
    }
    assert!(facets > 0);
}

#[test]
fn hypermetric_is_valid() {
    for s in 0..=3 {
        for t in 0..=2 {
            if s + t == 0 {
                continue;
            }
            for b in weights(s, t, &[-2, -1, 0, 1, 2]) {
                assert!(is_valid(&hypermetric(&b).unwrap()).unwrap().valid, "{b:?}");
            }
        }
    }
}

#[test]
fn cliqueweb_instances_are_tight() {
    for (s, t, r) in [(2, 2, 0), (3, 3, 0), (4, 2, 1), (4, 4, 0), (5, 3, 1), (5, 5, 0)] {
        let p = CliqueWebParams::new(s, t, r).unwrap();
        let c = cliqueweb_bell(p).unwrap();
        let via = convert_cut_to_cg(&triangular_eliminate(&cliqueweb(p).unwrap()).unwrap()).unwrap();
        assert_eq!(c.normalized(), via.normalized(), "({s}, {t}, {r})");
        let rep = tightness_report(&c.to_cut()).unwrap();
        assert!(rep.valid && rep.is_facet, "({s}, {t}, {r}): {rep:?}");
    }
    assert_eq!(cliqueweb_bell(CliqueWebParams { s: 2, t: 2, r: 0 }).unwrap(), pure_hypermetric_bell(2, 2, 2).unwrap());
}

#[test]
fn immm22_is_tight() {
    for m in 2..=5 {
        let rep = tightness_report(&immm22(m).unwrap().to_cut()).unwrap();
        assert!(rep.valid && rep.is_facet, "m = {m}: {rep:?}");
    }
}

#[test]
fn catalog_entries_are_tight() {
    for name in CATALOG {
        let ineq = catalog(name).unwrap().to_cut();
        let rep = tightness_report(&ineq).unwrap();
        assert!(rep.valid && rep.is_facet, "{name}: {rep:?}");
    }
    assert!(catalog("nope").is_err());
}

#[test]
fn inclusion() {
    let budget = InclusionBudget::default();
    for (s, t, r) in [(2, 2, 0), (3, 3, 0), (4, 2, 1), (4, 4, 0)] {
        let c = cliqueweb_bell(CliqueWebParams::new(s, t, r).unwrap()).unwrap();
        assert!(matches!(includes_chsh(&c, &budget).unwrap(), Inclusion::Found(_)), "({s}, {t}, {r})");
    }
    let pp = zero_lift(&cg("positive_probability"), 2, 2).unwrap();
    assert_eq!(includes_chsh(&pp, &budget).unwrap(), Inclusion::NotFound);
    let Inclusion::Found(cert) = includes_chsh(&cg("i3322"), &budget).unwrap() else { panic!() };
    assert!(cert.fixes.iter().all(|f| f.1 == 0));
}
