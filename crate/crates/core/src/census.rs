//! Tight Bell inequalities obtained by triangular elimination of the facet
//! classes of `CUT(K_n)`.
//!
//! Every facet class representative is taken on its own support `K_k`
//! (`k <= n`, so classes zero-lifted from smaller `n` are included). Its
//! nodes are labelled as X, Alice or Bob in every way, optionally leaving X
//! outside the support. Labelled sources are classified in party mode; by
//! the correspondence between source and eliminated classes this equals the
//! classification of the eliminated inequalities, which is spot-checked.

use std::collections::BTreeMap;

use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::analysis::{tightness_report, Scenario};
use crate::elimination::triangular_eliminate;
use crate::error::{Error, Result};
use crate::graph::{Graph, GraphKind, NodeId};
use crate::hull::cut_polytope_facets;
use crate::ineq::{convert_cut_to_cg, CgIneq, CutIneq};
use crate::symmetry::{canonical_with, equivalent, Budget, CanonicalKey, GroupMode};

#[derive(Clone, Copy, Debug)]
pub struct CensusOptions {
    /// Also label every support node as an observable, with X a fresh node.
    pub allow_x_outside: bool,
    /// Allow labellings that give one party no original observable.
    pub allow_empty_party: bool,
    /// Drop eliminated inequalities that are not facets.
    pub drop_nonfacets: bool,
    /// Number of random class pairs checked directly on the eliminated side.
    pub spot_checks: usize,
    pub seed: u64,
    /// Permit `n = 7`.
    pub long_running: bool,
}

impl Default for CensusOptions {
    fn default() -> Self {
        Self {
            allow_x_outside: true,
            allow_empty_party: true,
            drop_nonfacets: true,
            spot_checks: 8,
            seed: 0x7e11,
            long_running: false,
        }
    }
}

/// Roles given to the support nodes of a facet.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Labelling {
    /// Image of each support node, in support order.
    pub roles: Vec<NodeId>,
    pub x_in_support: bool,
}

#[derive(Clone, Debug)]
pub struct CensusClass {
    pub key: CanonicalKey,
    /// Index of the facet class the representative came from.
    pub facet_class: usize,
    pub labelling: Labelling,
    /// Labelled facet on the complete graph.
    pub source: CutIneq,
    /// Support-reduced triangular elimination on the tripartite graph.
    pub eliminated: CutIneq,
    pub cg: CgIneq,
    /// Number of (facet class, labelling) pairs in the class.
    pub members: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpotCheck {
    pub first: usize,
    pub second: usize,
    /// `true` when the eliminated forms were found inequivalent, as expected.
    pub distinct: bool,
}

#[derive(Clone, Debug)]
pub struct CensusReport {
    pub n: usize,
    pub facet_classes: usize,
    pub labellings: usize,
    pub dropped_nonfacets: usize,
    pub classes: Vec<CensusClass>,
    pub spot_checks: Vec<SpotCheck>,
}

impl CensusReport {
    pub fn count(&self) -> usize {
        self.classes.len()
    }
}

pub fn census(n: usize, opts: &CensusOptions) -> Result<CensusReport> {
    let facets = cut_polytope_facets(n, opts.long_running)?;
    let reps: Vec<CutIneq> = facets.classes.iter().map(|c| c.representative.clone()).collect();
    let mut report = census_from_facets(&reps, opts)?;
    report.n = n;
    Ok(report)
}

/// Facet of `K_k` on its own support, as a weight matrix over `0..k`.
struct Support {
    k: usize,
    w: Vec<crate::Rat>,
    rhs: crate::Rat,
}

fn restrict(f: &CutIneq) -> Result<Support> {
    let g = f.graph();
    if g.kind() != GraphKind::Complete {
        return Err(Error::WrongGraphKind { expected: "complete" });
    }
    let nodes = f.support();
    let k = nodes.len();
    let mut w = vec![crate::Rat::zero(); k * k];
    for (i, &p) in nodes.iter().enumerate() {
        for (j, &q) in nodes.iter().enumerate() {
            if i != j {
                w[i * k + j] = f.coeffs()[g.edge_between(p, q).expect("complete")].clone();
            }
        }
    }
    Ok(Support { k, w, rhs: f.rhs().clone() })
}

fn labellings(k: usize, opts: &CensusOptions) -> Vec<Labelling> {
    let mut out = Vec::new();
    // bit i of `mask` puts the i-th non-X node on Bob's side
    let mut push = |mask: u64, x: Option<usize>| {
        let mut roles = vec![NodeId::X; k];
        let (mut na, mut nb) = (0, 0);
        for (i, role) in roles.iter_mut().enumerate() {
            let bit = match x {
                Some(x) if i == x => continue,
                Some(x) if i > x => i - 1,
                _ => i,
            };
            if mask >> bit & 1 == 1 {
                nb += 1;
                *role = NodeId::b(nb);
            } else {
                na += 1;
                *role = NodeId::a(na);
            }
        }
        if opts.allow_empty_party || (na > 0 && nb > 0) {
            out.push(Labelling { roles, x_in_support: x.is_some() });
        }
    };
    for x in 0..k {
        for mask in 0u64..1 << (k - 1) {
            push(mask, Some(x));
        }
    }
    if opts.allow_x_outside {
        for mask in 0u64..1 << k {
            push(mask, None);
        }
    }
    out
}

fn labelled_source(s: &Support, l: &Labelling) -> Result<CutIneq> {
    let na = l.roles.iter().filter(|r| r.party == crate::graph::Party::A).count();
    let nb = l.roles.iter().filter(|r| r.party == crate::graph::Party::B).count();
    let mut f = CutIneq::zero(Graph::new(GraphKind::Complete, na, nb)?);
    for i in 0..s.k {
        for j in i + 1..s.k {
            let c = &s.w[i * s.k + j];
            if !c.is_zero() {
                f.set_coeff(l.roles[i], l.roles[j], c.clone())?;
            }
        }
    }
    f.set_rhs(s.rhs.clone());
    Ok(f)
}

/// Every labelled copy of a facet of a complete graph that the census
/// considers, before elimination.
pub fn labelled_sources(facet: &CutIneq, opts: &CensusOptions) -> Result<Vec<(Labelling, CutIneq)>> {
    let s = restrict(facet)?;
    labellings(s.k, opts)
        .into_iter()
        .map(|l| labelled_source(&s, &l).map(|f| (l, f)))
        .collect()
}

struct Item {
    facet_class: usize,
    labelling: Labelling,
    source: CutIneq,
    eliminated: CutIneq,
    key: CanonicalKey,
}

/// Census over externally supplied facets of complete graphs, typically one
/// representative per class.
pub fn census_from_facets(facets: &[CutIneq], opts: &CensusOptions) -> Result<CensusReport> {
    let supports: Vec<Support> = facets.iter().map(restrict).collect::<Result<_>>()?;
    let jobs: Vec<(usize, Labelling)> = supports
        .iter()
        .enumerate()
        .flat_map(|(c, s)| labellings(s.k, opts).into_iter().map(move |l| (c, l)))
        .collect();
    let budget = Budget::default();
    let results: Vec<Option<Item>> = jobs
        .par_iter()
        .enumerate()
        .map(|(index, (c, l))| {
            let run = || -> Result<Option<Item>> {
                let source = labelled_source(&supports[*c], l)?;
                let eliminated = triangular_eliminate(&source)?.support_reduce().ineq;
                if opts.drop_nonfacets && !tightness_report(&eliminated)?.is_facet {
                    return Ok(None);
                }
                let key = canonical_with(&source, GroupMode::Party, &budget)?.key;
                Ok(Some(Item { facet_class: *c, labelling: l.clone(), source, eliminated, key }))
            };
            run().map_err(|e| e.at(index))
        })
        .collect::<Result<_>>()?;

    let dropped = results.iter().filter(|r| r.is_none()).count();
    let mut groups: BTreeMap<CanonicalKey, (Item, usize)> = BTreeMap::new();
    for item in results.into_iter().flatten() {
        match groups.get_mut(&item.key) {
            Some(entry) => entry.1 += 1,
            None => {
                groups.insert(item.key.clone(), (item, 1));
            }
        }
    }
    let classes: Vec<CensusClass> = groups
        .into_values()
        .map(|(item, members)| {
            let cg = convert_cut_to_cg(&item.eliminated)?;
            Ok(CensusClass {
                key: item.key,
                facet_class: item.facet_class,
                labelling: item.labelling,
                source: item.source,
                eliminated: item.eliminated,
                cg,
                members,
            })
        })
        .collect::<Result<_>>()?;

    let spot_checks = spot_check(&classes, opts);
    Ok(CensusReport {
        n: supports.iter().map(|s| s.k).max().unwrap_or(0),
        facet_classes: facets.len(),
        labellings: jobs.len(),
        dropped_nonfacets: dropped,
        classes,
        spot_checks,
    })
}

/// Compares random pairs of classes directly on the eliminated side.
fn spot_check(classes: &[CensusClass], opts: &CensusOptions) -> Vec<SpotCheck> {
    let mut pairs: Vec<(usize, usize)> = (0..classes.len())
        .flat_map(|i| (i + 1..classes.len()).map(move |j| (i, j)))
        .filter(|&(i, j)| classes[i].eliminated.scenario_size() == classes[j].eliminated.scenario_size())
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    pairs.shuffle(&mut rng);
    pairs.truncate(opts.spot_checks);
    pairs.sort_unstable();
    pairs
        .into_par_iter()
        .map(|(i, j)| SpotCheck {
            first: i,
            second: j,
            distinct: equivalent(&classes[i].eliminated, &classes[j].eliminated, GroupMode::Party).is_none(),
        })
        .collect()
}

trait ScenarioSize {
    fn scenario_size(&self) -> (usize, usize);
}

impl ScenarioSize for CutIneq {
    /// Unordered scenario, so that swapped parties compare equal.
    fn scenario_size(&self) -> (usize, usize) {
        let (a, b) = self.scenario();
        (a.min(b), a.max(b))
    }
}
