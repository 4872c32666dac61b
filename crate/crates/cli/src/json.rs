//! JSON mirrors of the library reports. Rationals are strings (`"-3/2"`).

use num_traits::Zero;
use serde_json::{json, Map, Value};
use trielim::scalar::format_rat;
use trielim::{
    CensusReport, CgIneq, ClassReport, CutIneq, CutPolytopeFacets, GraphKind, HRep, Inclusion, Inequality, NodeId,
    Rat, Scenario, TightnessReport, Validity,
};

fn r(v: &Rat) -> Value {
    Value::String(format_rat(v))
}

pub fn cut(f: &CutIneq) -> Value {
    let g = f.graph();
    let mut coeffs = Map::new();
    for (e, c) in f.coeffs().iter().enumerate() {
        if !c.is_zero() {
            coeffs.insert(g.edge_label(e), r(c));
        }
    }
    json!({
        "repr": "cut",
        "kind": match g.kind() { GraphKind::Complete => "complete", GraphKind::Tripartite => "tripartite" },
        "n_a": g.n_a(),
        "n_b": g.n_b(),
        "rhs": r(f.rhs()),
        "coeffs": coeffs,
    })
}

pub fn cg(c: &CgIneq) -> Value {
    json!({
        "repr": "cg",
        "m_a": c.m_a(),
        "m_b": c.m_b(),
        "rhs": r(c.rhs()),
        "alice": c.alice().iter().map(r).collect::<Vec<_>>(),
        "bob": c.bob().iter().map(r).collect::<Vec<_>>(),
        "joint": c.joint().iter().map(|row| row.iter().map(r).collect::<Vec<_>>()).collect::<Vec<_>>(),
    })
}

pub fn ineq(i: &Inequality) -> Value {
    match i {
        Inequality::Cut(f) => cut(f),
        Inequality::Cg(c) => cg(c),
    }
}

fn nodes(list: &[NodeId]) -> Vec<String> {
    list.iter().map(ToString::to_string).collect()
}

pub fn check(f: &CutIneq, v: &Validity, t: Option<&TightnessReport>) -> Value {
    let mut out = json!({
        "valid": v.valid,
        "max_value": r(&v.max_value),
        "witness": v.witness.map(|c| nodes(&c.members(f.graph()))),
    });
    if let Some(t) = t {
        out["root_count"] = Value::String(t.root_count.to_string());
        out["face_dim"] = json!(t.face_dim);
        out["polytope_dim"] = json!(t.polytope_dim);
        out["is_facet"] = json!(t.is_facet);
    }
    out
}

pub fn classes(mode: &str, reports: &[ClassReport]) -> Value {
    json!({
        "mode": mode,
        "count": reports.len(),
        "classes": reports.iter().map(|c| json!({
            "representative": cut(&c.representative),
            "members": c.members,
            "size": c.count(),
        })).collect::<Vec<_>>(),
    })
}

pub fn census(rep: &CensusReport) -> Value {
    json!({
        "n": rep.n,
        "facet_classes": rep.facet_classes,
        "labellings": rep.labellings,
        "dropped_nonfacets": rep.dropped_nonfacets,
        "count": rep.count(),
        "classes": rep.classes.iter().map(|c| json!({
            "scenario": c.eliminated.scenario(),
            "members": c.members,
            "facet_class": c.facet_class,
            "labelling": nodes(&c.labelling.roles),
            "x_in_support": c.labelling.x_in_support,
            "source": cut(&c.source),
            "eliminated": cut(&c.eliminated),
            "cg": cg(&c.cg),
        })).collect::<Vec<_>>(),
        "spot_checks": rep.spot_checks.iter().map(|s| json!({
            "first": s.first,
            "second": s.second,
            "distinct": s.distinct,
        })).collect::<Vec<_>>(),
    })
}

pub fn cut_hull(h: &CutPolytopeFacets) -> Value {
    json!({
        "n": h.n,
        "dimension": h.hrep.dimension,
        "vertex_count": h.hrep.vertex_count,
        "facet_count": h.facets.len(),
        "class_count": h.classes.len(),
        "class_sizes": h.classes.iter().map(ClassReport::count).collect::<Vec<_>>(),
        "classes": h.classes.iter().map(|c| cut(&c.representative)).collect::<Vec<_>>(),
        "facets": h.facets.iter().map(cut).collect::<Vec<_>>(),
    })
}

pub fn hull(h: &HRep) -> Value {
    json!({
        "dimension": h.dimension,
        "vertex_count": h.vertex_count,
        "facet_count": h.inequalities.len(),
        "inequalities": h.inequalities.iter().map(|s| json!({
            "coeffs": s.coeffs.iter().map(ToString::to_string).collect::<Vec<_>>(),
            "rhs": s.rhs.to_string(),
        })).collect::<Vec<_>>(),
    })
}

pub fn inclusion(result: &Inclusion) -> Value {
    match result {
        Inclusion::Found(cert) => json!({
            "result": "found",
            "kept": nodes(&cert.kept),
            "fixes": cert.fixes.iter().map(|(v, x)| json!([v.to_string(), x])).collect::<Vec<_>>(),
            "residual": cg(&cert.residual),
        }),
        Inclusion::NotFound => json!({ "result": "not_found" }),
        Inclusion::Unknown => json!({ "result": "unknown" }),
    }
}
