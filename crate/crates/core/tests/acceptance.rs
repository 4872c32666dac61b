//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails. Criterion 11 runs only with
//! `--long-running` or `TRIELIM_LONG_RUNNING=1`.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use trielim::*;

type Check = std::result::Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn ok<T, E: std::fmt::Display>(r: std::result::Result<T, E>) -> std::result::Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn hull(n: usize) -> &'static CutPolytopeFacets {
    static CACHE: [OnceLock<CutPolytopeFacets>; 7] = [const { OnceLock::new() }; 7];
    CACHE[n].get_or_init(|| cut_polytope_facets(n, false).expect("hull"))
}

fn census_of(n: usize) -> &'static CensusReport {
    static CACHE: [OnceLock<CensusReport>; 7] = [const { OnceLock::new() }; 7];
    CACHE[n].get_or_init(|| {
        let reps: Vec<CutIneq> = hull(n).classes.iter().map(|c| c.representative.clone()).collect();
        let mut r = census_from_facets(&reps, &CensusOptions::default()).expect("census");
        r.n = n;
        r
    })
}

fn cg(name: &str) -> CgIneq {
    catalog(name).unwrap().to_cg().unwrap()
}

fn te(f: &CutIneq) -> CutIneq {
    triangular_eliminate(f).unwrap().support_reduce().ineq
}

/// The I_3322 table obtained by eliminating the pentagonal inequality, with `A3 = A'12`
/// and `B3 = B'12`.
fn i3322_worked() -> CgIneq {
    CgIneq::from_ints(&[0, -1, 0], &[-1, -2, 0], &[[1, 1, -1], [1, 1, 1], [-1, 1, 0]], 0).unwrap()
}

fn is_facet(f: &CutIneq) -> bool {
    tightness_report(f).map(|r| r.valid && r.is_facet).unwrap_or(false)
}

fn unordered(f: &CutIneq) -> (usize, usize) {
    let (a, b) = f.scenario();
    (a.min(b), a.max(b))
}

/// Triangle facets labelled so that every non-X node lies in one party.
fn excluded_triangle(source: &CutIneq) -> bool {
    let g = source.graph();
    let support = source.support();
    if support.len() != 3 {
        return false;
    }
    let parties: Vec<Party> = support.iter().filter(|&&p| p > 0).map(|&p| g.party_of(p)).collect();
    parties.windows(2).all(|w| w[0] == w[1])
}

fn c1() -> Check {
    let mut te_counts = Vec::new();
    let mut facet_counts = Vec::new();
    for n in 3..=6 {
        facet_counts.push(hull(n).classes.len());
        te_counts.push(census_of(n).count());
    }
    let detail = format!("TE classes {te_counts:?}, facet classes {facet_counts:?}");
    ensure!(te_counts == [2, 2, 8, 22], "{detail}; expected TE classes [2, 2, 8, 22]");
    ensure!(facet_counts == [1, 1, 2, 3], "{detail}; expected facet classes [1, 1, 2, 3]");
    Ok(detail)
}

fn c2() -> Check {
    let mut counts = Vec::new();
    let mut uncertified = 0;
    for n in 3..=6 {
        let h = hull(n);
        counts.push(h.facets.len());
        uncertified += h.facets.iter().filter(|f| !is_facet(f)).count();
    }
    let detail = format!("facets {counts:?}, {uncertified} not re-certified by the rank path");
    ensure!(uncertified == 0, "{detail}");
    ensure!(counts == [4, 16, 56, 210], "{detail}; expected [4, 16, 56, 210]");
    Ok(detail)
}

fn c3() -> Check {
    let pent = catalog("pentagonal").unwrap().to_cut();
    let eliminated = ok(convert_cut_to_cg(&ok(triangular_eliminate(&pent))?))?;
    ensure!(
        eliminated.normalized() == i3322_worked().normalized(),
        "TE(pentagonal) = {eliminated:?}"
    );
    let tri = catalog("triangle").unwrap().to_cut();
    let t = te(&tri);
    let chsh = cg("chsh").to_cut();
    let cert = equivalent(&t, &chsh, GroupMode::Party).ok_or("TE(triangle) not equivalent to CHSH")?;
    ensure!(cert.verify(&t, &chsh), "certificate does not reproduce CHSH");
    let mapping: Vec<String> = cert.mapping.iter().map(|(u, v)| format!("{u}->{v}")).collect();
    Ok(format!("pentagonal gives the I_3322 table; triangle to CHSH via {}", mapping.join(" ")))
}

fn c4() -> Check {
    let g = ok(Graph::tripartite(3, 3))?;
    let redundant = ok(CutIneq::from_terms(
        g,
        &[("XA1", 1), ("XA2", 1), ("XB1", -1), ("XB2", -1), ("A1B1", -1), ("A2B2", -3)],
        0,
    ))?;
    let r = ok(tightness_report(&redundant))?;
    ensure!(r.valid && !r.is_facet, "redundant example: {r:?}");
    let forms = [
        ok(CutIneq::from_terms(ok(Graph::complete(2, 0))?, &[("XA1", -1), ("XA2", -1), ("A1A2", 1)], 0))?,
        ok(CutIneq::from_terms(ok(Graph::complete(3, 0))?, &[("A1A2", -1), ("A1A3", -1), ("A2A3", 1)], 0))?,
    ];
    let mut dims = Vec::new();
    for f in &forms {
        let e = ok(triangular_eliminate(f))?;
        let r = ok(tightness_report(&e))?;
        ensure!(r.valid && !r.is_facet, "excluded triangle {f}: {r:?}");
        dims.push((r.face_dim, r.polytope_dim));
    }
    Ok(format!("redundant face dim {} of {}, excluded triangles {dims:?}", r.face_dim, r.polytope_dim))
}

fn c5() -> Check {
    let opts = CensusOptions::default();
    let (mut checked, mut excluded) = (0, 0);
    for n in [5, 6] {
        for class in &hull(n).classes {
            for (l, source) in ok(labelled_sources(&class.representative, &opts))? {
                if excluded_triangle(&source) {
                    excluded += 1;
                    continue;
                }
                let e = ok(triangular_eliminate(&source))?;
                ensure!(is_facet(&e), "n = {n}, labelling {:?}: TE of {source} is not a facet", l.roles);
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} labelled facets eliminate to facets, {excluded} excluded triangles skipped"))
}

/// Random party relabelling (with optional party swap) followed by a random switching.
fn random_symmetry(f: &CutIneq, rng: &mut ChaCha8Rng) -> CutIneq {
    let g = f.graph();
    let mut pa: Vec<usize> = (1..=g.n_a()).collect();
    let mut pb: Vec<usize> = (1..=g.n_b()).collect();
    pa.shuffle(rng);
    pb.shuffle(rng);
    let swap = rng.gen_bool(0.5);
    let mut images = vec![NodeId::X];
    images.extend(pa.iter().map(|&i| if swap { NodeId::b(i) } else { NodeId::a(i) }));
    images.extend(pb.iter().map(|&j| if swap { NodeId::a(j) } else { NodeId::b(j) }));
    let h = permute(f, &Relabelling::new(images), GroupMode::Party).unwrap();
    let w: Vec<NodeId> = h.graph().nodes().skip(1).filter(|_| rng.gen_bool(0.5)).collect();
    switch(&h, h.graph().cut_of(&w).unwrap()).unwrap()
}

fn c6() -> Check {
    let opts = CensusOptions::default();
    let facets: Vec<&CutIneq> = hull(5).facets.iter().chain(&hull(6).facets).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(25);
    let draw = |rng: &mut ChaCha8Rng| loop {
        let f = facets.choose(rng).unwrap();
        let sources = labelled_sources(f, &opts).unwrap();
        let (_, s) = sources.choose(rng).unwrap().clone();
        if !excluded_triangle(&s) {
            return s;
        }
    };
    let (mut equal, mut distinct) = (0, 0);
    for k in 0..200 {
        let f = draw(&mut rng);
        let g = if k % 2 == 0 { random_symmetry(&f, &mut rng) } else { draw(&mut rng) };
        let source_eq = ok(canonical_form(&f, GroupMode::Party))? == ok(canonical_form(&g, GroupMode::Party))?;
        ensure!(k % 2 == 1 || source_eq, "pair {k}: symmetry image not equivalent to {f}");
        let (tf, tg) = (te(&f), te(&g));
        let te_eq = match equivalent(&tf, &tg, GroupMode::Party) {
            Some(cert) => {
                ensure!(cert.verify(&tf, &tg), "pair {k}: certificate fails");
                true
            }
            None => false,
        };
        ensure!(source_eq == te_eq, "pair {k}: sources equivalent {source_eq}, eliminated {te_eq}\n{f}\n{g}");
        if te_eq {
            equal += 1;
        } else {
            distinct += 1;
        }
    }
    let mut class_pairs = 0;
    for n in [5, 6] {
        let classes = &census_of(n).classes;
        for (i, a) in classes.iter().enumerate() {
            for b in &classes[i + 1..] {
                if unordered(&a.eliminated) != unordered(&b.eliminated) {
                    continue;
                }
                ensure!(
                    equivalent(&a.eliminated, &b.eliminated, GroupMode::Party).is_none(),
                    "census {n}: classes {} and {} coincide on the eliminated side",
                    a.eliminated,
                    b.eliminated
                );
                class_pairs += 1;
            }
        }
    }
    Ok(format!("200 pairs ({equal} equivalent, {distinct} not), {class_pairs} census class pairs distinct"))
}

/// All weight vectors with the given side lengths and entries in `values`.
fn weights(s: usize, t: usize, values: &[i64]) -> Vec<WeightVector> {
    let n = s + t;
    let mut out = Vec::new();
    let mut idx = vec![0usize; n];
    loop {
        let w: Vec<i64> = idx.iter().map(|&k| values[k]).collect();
        out.push(WeightVector::new(w[..s].to_vec(), w[s..].to_vec()));
        let Some(p) = (0..n).find(|&p| idx[p] + 1 < values.len()) else { return out };
        idx[p] += 1;
        idx[..p].iter_mut().for_each(|v| *v = 0);
    }
}

fn c7() -> Check {
    let mut vectors = 0;
    for s in 0..=3 {
        for t in 0..=3 {
            if s + t == 0 {
                continue;
            }
            for b in weights(s, t, &[-2, -1, 1, 2]) {
                let direct = ok(hypermetric_bell(&b))?.normalized();
                let via = ok(convert_cut_to_cg(&ok(triangular_eliminate(&ok(hypermetric(&b))?))?))?.normalized();
                ensure!(direct == via, "weights {b:?}: closed form differs from the pipeline");
                vectors += 1;
            }
        }
    }
    let party = |a: &CgIneq, b: &CgIneq| equivalent(&a.to_cut(), &b.to_cut(), GroupMode::Party).is_some();
    ensure!(party(&ok(pure_hypermetric_bell(1, 1, 2))?, &cg("chsh")), "(1,1,2) is not CHSH");
    ensure!(
        ok(pure_hypermetric_bell(2, 2, 2))?.normalized() == i3322_worked().normalized(),
        "(2,2,2) is not the I_3322 table"
    );
    ensure!(party(&ok(pure_hypermetric_bell(2, 1, 3))?, &cg("i3422_2")), "(2,1,3) is not I2_3422");
    let cw = ok(cliqueweb_bell(ok(CliqueWebParams::new(2, 2, 0))?))?;
    ensure!(cw.normalized() == i3322_worked().normalized(), "cliqueweb (2,2,0) is not the I_3322 table");
    let mut tight = Vec::new();
    for s in 2..=5usize {
        for t in (2..=s).rev() {
            if (s - t) % 2 != 0 {
                continue;
            }
            let c = ok(cliqueweb_bell(ok(CliqueWebParams::new(s, t, (s - t) / 2))?))?;
            ensure!(is_facet(&c.to_cut()), "cliqueweb ({s},{t},{}) not tight", (s - t) / 2);
            tight.push((s, t, (s - t) / 2));
        }
    }
    Ok(format!("{vectors} weight vectors agree; clique-web {tight:?} tight"))
}

fn c8() -> Check {
    ensure!(ok(immm22(2))?.normalized() == cg("chsh").normalized(), "I_2222 differs from CHSH");
    ensure!(ok(immm22(3))?.normalized() == cg("i3322").normalized(), "I_3322 family member differs from I_3322");
    let opts = CensusOptions::default();
    let mut found = Vec::new();
    for (m, name) in [(2, "triangle"), (3, "pentagonal"), (4, "grishukhin")] {
        let target = ok(immm22(m))?.to_cut();
        let facet = catalog(name).unwrap().to_cut();
        let hit = ok(labelled_sources(&facet, &opts))?.into_iter().find_map(|(l, s)| {
            let e = te(&s);
            (unordered(&e) == (m, m) && equivalent(&e, &target, GroupMode::Party).is_some()).then_some(l)
        });
        let l = hit.ok_or_else(|| format!("no labelling of {name} eliminates to I_{m}{m}22"))?;
        found.push(format!("{name}: {:?}", l.roles.iter().map(ToString::to_string).collect::<Vec<_>>()));
    }
    for m in 2..=5 {
        ensure!(is_facet(&ok(immm22(m))?.to_cut()), "I_{m}{m}22 not tight");
    }
    Ok(found.join("; "))
}

fn c9() -> Check {
    let budget = InclusionBudget::default();
    let chsh = cg("chsh").to_cut();
    let fixed = ok(fix_observables(&cg("i3322"), &[(NodeId::a(3), 0), (NodeId::b(1), 0)]))?;
    let fixed = fixed.to_cut().support_reduce().ineq;
    ensure!(equivalent(&fixed, &chsh, GroupMode::Party).is_some(), "I_3322 with A3=0, B1=0 is {fixed}");

    let found = |c: &CgIneq| -> std::result::Result<bool, String> {
        match ok(includes_chsh(c, &budget))? {
            Inclusion::Found(cert) => {
                let residual = cert.residual.to_cut().support_reduce().ineq;
                Ok(cert.certificate.verify(&residual, &chsh) || equivalent(&residual, &chsh, GroupMode::Party).is_some())
            }
            _ => Ok(false),
        }
    };
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    let values = [-2, -1, 1, 2];
    for _ in 0..12 {
        let s = rng.gen_range(2..=3);
        let t = rng.gen_range(1..=3);
        let mut alice = vec![1, 1];
        alice.extend((2..s).map(|_| *values.choose(&mut rng).unwrap()));
        let mut bob: Vec<i64> = (0..t).map(|_| *values.choose(&mut rng).unwrap()).collect();
        bob[rng.gen_range(0..t)] = -1;
        let b = WeightVector::new(alice, bob);
        ensure!(found(&ok(hypermetric_bell(&b))?)?, "no CHSH certificate for weights {b:?}");
    }
    let mut cws = Vec::new();
    for (s, t, r) in [(2, 2, 0), (3, 3, 0), (4, 2, 1), (4, 4, 0)] {
        ensure!(found(&ok(cliqueweb_bell(ok(CliqueWebParams::new(s, t, r))?))?)?, "no certificate for cliqueweb ({s},{t},{r})");
        cws.push((s, t, r));
    }
    let pp = ok(zero_lift(&cg("positive_probability"), 2, 2))?;
    let r = ok(includes_chsh(&pp, &budget))?;
    ensure!(r == Inclusion::NotFound, "positive probability on (2,2): {r:?}");
    Ok(format!("12 sampled hypermetric vectors and clique-web {cws:?} include CHSH; positive probability does not"))
}

fn c10() -> Check {
    let i1 = cg("i3422_1").to_cut();
    let i3 = cg("i3422_3").to_cut();
    ensure!(is_facet(&i1) && is_facet(&i3), "I1_3422 or I3_3422 not tight");
    ensure!(equivalent(&i1, &i3, GroupMode::Party).is_none(), "I1_3422 and I3_3422 are equivalent");
    let fits: Vec<&CensusClass> = census_of(6)
        .classes
        .iter()
        .filter(|c| {
            let (a, b) = unordered(&c.eliminated);
            a <= 3 && b <= 4
        })
        .collect();
    ensure!(fits.len() == 4, "{} census classes fit in (3,4), expected 4", fits.len());
    for c in &fits {
        for (name, i) in [("I1_3422", &i1), ("I3_3422", &i3)] {
            ensure!(
                equivalent(&c.eliminated, i, GroupMode::Party).is_none(),
                "{name} equivalent to census class {}",
                c.eliminated
            );
        }
    }
    let scenarios: Vec<(usize, usize)> = fits.iter().map(|c| unordered(&c.eliminated)).collect();
    Ok(format!("both tight and new; census classes in (3,4): {scenarios:?}"))
}

fn c11() -> Check {
    let h = ok(cut_polytope_facets(7, true))?;
    let reps: Vec<CutIneq> = h.classes.iter().map(|c| c.representative.clone()).collect();
    let opts = CensusOptions { long_running: true, ..CensusOptions::default() };
    let r = ok(census_from_facets(&reps, &opts))?;
    let detail = format!("{} facet classes, {} TE classes", h.classes.len(), r.count());
    ensure!(h.classes.len() == 11 && r.count() == 323, "{detail}; expected 11 and 323");
    Ok(detail)
}

struct Criterion {
    id: u32,
    title: &'static str,
    tolerance: &'static str,
    limit: Duration,
    run: fn() -> Check,
}

fn main() {
    let long_running = std::env::args().any(|a| a == "--long-running" || a == "--include-ignored")
        || std::env::var("TRIELIM_LONG_RUNNING").is_ok_and(|v| v == "1");
    let min = |m: u64| Duration::from_secs(60 * m);
    let criteria = [
        Criterion { id: 1, title: "census and facet class counts, n = 3..6", tolerance: "exact, < 10 min", limit: min(10), run: c1 },
        Criterion { id: 2, title: "raw facet counts CUT_3..CUT_6", tolerance: "exact", limit: min(10), run: c2 },
        Criterion { id: 3, title: "worked examples", tolerance: "exact, < 1 s", limit: Duration::from_secs(1), run: c3 },
        Criterion { id: 4, title: "negative controls", tolerance: "exact, < 1 s", limit: Duration::from_secs(1), run: c4 },
        Criterion { id: 5, title: "facets eliminate to facets", tolerance: "exact, < 5 min", limit: min(5), run: c5 },
        Criterion { id: 6, title: "symmetry correspondence", tolerance: "exact, < 5 min", limit: min(5), run: c6 },
        Criterion { id: 7, title: "family cross-validation", tolerance: "exact, < 10 min", limit: min(10), run: c7 },
        Criterion { id: 8, title: "I_mm22 family", tolerance: "exact, < 10 min", limit: min(10), run: c8 },
        Criterion { id: 9, title: "CHSH inclusion", tolerance: "exact, < 2 min", limit: min(2), run: c9 },
        Criterion { id: 10, title: "I1_3422 and I3_3422 are new", tolerance: "exact, < 2 min", limit: min(2), run: c10 },
        Criterion { id: 11, title: "n = 7 census", tolerance: "exact, long running", limit: Duration::MAX, run: c11 },
    ];
    std::panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for c in &criteria {
        if c.id == 11 && !long_running {
            println!("SKIP {:>2}  {}  [{}]  pass --long-running to run", c.id, c.title, c.tolerance);
            continue;
        }
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(c.run)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(ToString::to_string))
                .unwrap_or_default();
            Err(format!("panic: {msg}"))
        });
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(d) if elapsed > c.limit => Err(format!("{d}; took {elapsed:.1?}, limit {:?}", c.limit)),
            o => o,
        };
        let (tag, detail) = match outcome {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("{tag} {:>2}  {}  [{}]  {detail}  ({elapsed:.2?})", c.id, c.title, c.tolerance);
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
