//! JSON forms. An atom is a string, a pair a two-element array, a section
//! `{"sect": [[key, value], ...]}`. A set is an array of elements and a
//! function lists its graph as `[[input, output], ...]`, under `map` when
//! it travels with its domain and codomain.

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::extension::{EvalTrace, NatComponentTrace};
use crate::finset::{Element, FinFn, FinSet};
use crate::poly::{mk_poly, CartesianMorphism, Polynomial, SubdividedComposite};
use crate::slices::{SliceMor, SliceObj};

fn bad<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Json(msg.into()))
}

pub fn element_to_json(e: &Element) -> Value {
    match e {
        Element::Atom(a) => Value::String(a.to_string()),
        Element::Pair(p) => json!([element_to_json(&p.0), element_to_json(&p.1)]),
        Element::Sect(s) => {
            json!({ "sect": s.iter().map(|(k, v)| json!([element_to_json(k), element_to_json(v)])).collect::<Vec<_>>() })
        }
    }
}

fn pair_of(v: &Value) -> Result<(&Value, &Value)> {
    match v.as_array().map(Vec::as_slice) {
        Some([a, b]) => Ok((a, b)),
        _ => bad(format!("expected a two-element array, found {v}")),
    }
}

pub fn element_from_json(v: &Value) -> Result<Element> {
    match v {
        Value::String(s) => Ok(Element::atom(s)),
        Value::Array(_) => {
            let (a, b) = pair_of(v)?;
            Ok(Element::pair(element_from_json(a)?, element_from_json(b)?))
        }
        Value::Object(o) if o.len() == 1 && o.contains_key("sect") => {
            let entries = o["sect"].as_array().ok_or_else(|| Error::Json("sect must hold an array".into()))?;
            let entries = entries
                .iter()
                .map(|e| {
                    let (k, x) = pair_of(e)?;
                    Ok((element_from_json(k)?, element_from_json(x)?))
                })
                .collect::<Result<Vec<_>>>()?;
            Element::sect(entries)
        }
        _ => bad(format!("not an element: {v}")),
    }
}

pub fn set_to_json(s: &FinSet) -> Value {
    Value::Array(s.iter().map(element_to_json).collect())
}

pub fn set_from_json(v: &Value) -> Result<FinSet> {
    let items = v.as_array().ok_or_else(|| Error::Json(format!("a set must be an array, found {v}")))?;
    FinSet::new(items.iter().map(element_from_json).collect::<Result<Vec<_>>>()?)
}

pub fn graph_to_json(f: &FinFn) -> Value {
    Value::Array(f.graph().map(|(a, b)| json!([element_to_json(a), element_to_json(b)])).collect())
}

pub fn graph_from_json(dom: &FinSet, cod: &FinSet, v: &Value) -> Result<FinFn> {
    let items = v.as_array().ok_or_else(|| Error::Json("a graph must be an array".into()))?;
    let pairs = items
        .iter()
        .map(|e| {
            let (a, b) = pair_of(e)?;
            Ok((element_from_json(a)?, element_from_json(b)?))
        })
        .collect::<Result<Vec<_>>>()?;
    FinFn::new(dom.clone(), cod.clone(), pairs)
}

pub fn fn_to_json(f: &FinFn) -> Value {
    json!({ "dom": set_to_json(f.dom()), "cod": set_to_json(f.cod()), "map": graph_to_json(f) })
}

pub fn fn_from_json(v: &Value) -> Result<FinFn> {
    let dom = set_from_json(field(v, "dom")?)?;
    let cod = set_from_json(field(v, "cod")?)?;
    graph_from_json(&dom, &cod, field(v, "map")?)
}

fn field<'a>(v: &'a Value, name: &str) -> Result<&'a Value> {
    v.get(name).ok_or_else(|| Error::Json(format!("missing field {name}")))
}

pub fn poly_to_json(p: &Polynomial) -> Value {
    json!({
        "src": set_to_json(p.src()),
        "A": set_to_json(p.mid_src()),
        "B": set_to_json(p.mid_tgt()),
        "tgt": set_to_json(p.tgt()),
        "p1": graph_to_json(&p.p1),
        "p2": graph_to_json(&p.p2),
        "p3": graph_to_json(&p.p3),
    })
}

pub fn poly_from_json(v: &Value) -> Result<Polynomial> {
    let x = set_from_json(field(v, "src")?)?;
    let a = set_from_json(field(v, "A")?)?;
    let b = set_from_json(field(v, "B")?)?;
    let y = set_from_json(field(v, "tgt")?)?;
    mk_poly(
        graph_from_json(&a, &x, field(v, "p1")?)?,
        graph_from_json(&a, &b, field(v, "p2")?)?,
        graph_from_json(&b, &y, field(v, "p3")?)?,
    )
}

pub fn cartesian_to_json(m: &CartesianMorphism) -> Value {
    json!({
        "p": poly_to_json(&m.src),
        "q": poly_to_json(&m.tgt),
        "f0": graph_to_json(&m.f0),
        "f1": graph_to_json(&m.f1),
    })
}

/// Reads a cartesian morphism without validating it.
pub fn cartesian_from_json(v: &Value) -> Result<CartesianMorphism> {
    let p = poly_from_json(field(v, "p")?)?;
    let q = poly_from_json(field(v, "q")?)?;
    let f0 = graph_from_json(p.mid_src(), q.mid_src(), field(v, "f0")?)?;
    let f1 = graph_from_json(p.mid_tgt(), q.mid_tgt(), field(v, "f1")?)?;
    Ok(CartesianMorphism::new_unchecked(p, q, f0, f1))
}

fn fns(fs: &[FinFn]) -> Value {
    Value::Array(fs.iter().map(fn_to_json).collect())
}

pub fn sdc_to_json(s: &SubdividedComposite) -> Value {
    json!({
        "start": set_to_json(&s.start),
        "over": s.over.iter().map(poly_to_json).collect::<Vec<_>>(),
        "levels": s.levels.iter().map(set_to_json).collect::<Vec<_>>(),
        "q1": fn_to_json(&s.q1),
        "q2s": fns(&s.q2s),
        "q3": fn_to_json(&s.q3),
        "rs": fns(&s.rs),
        "ss": fns(&s.ss),
    })
}

pub fn slice_to_json(x: &SliceObj) -> Value {
    fn_to_json(&x.arrow)
}

pub fn slice_mor_to_json(h: &SliceMor) -> Value {
    json!({ "src": slice_to_json(&h.src), "tgt": slice_to_json(&h.tgt), "map": graph_to_json(&h.mediating) })
}

pub fn eval_trace_to_json(t: &EvalTrace) -> Value {
    json!({
        "input": slice_to_json(&t.input),
        "C2": set_to_json(t.c2()),
        "C3": set_to_json(t.c3()),
        "C4": set_to_json(t.c4()),
        "C2_to_C": graph_to_json(&t.counit),
        "C2_to_A": graph_to_json(&t.to_a),
        "C3_to_C2": graph_to_json(&t.p),
        "C3_to_C4": graph_to_json(&t.q),
        "C4_to_B": graph_to_json(&t.r),
        "output": slice_to_json(&t.output),
    })
}

pub fn nat_trace_to_json(t: &NatComponentTrace) -> Value {
    json!({
        "top": eval_trace_to_json(&t.top),
        "bottom": eval_trace_to_json(&t.bottom),
        "f2": graph_to_json(&t.f2),
        "f3": graph_to_json(&t.f3),
        "f4": graph_to_json(&t.f4),
    })
}

/// Pretty JSON with stable key order.
pub fn render(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("values always serialize")
}

pub fn parse(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| Error::Json(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbolic::{encode, parse_poly};

    #[test]
    fn elements_round_trip() {
        let e = Element::pair(
            Element::atom("b"),
            Element::sect(vec![(Element::atom("a2"), Element::atom("z")), (Element::atom("a1"), Element::atom("w"))]).unwrap(),
        );
        let v = element_to_json(&e);
        assert_eq!(v, json!(["b", { "sect": [["a1", "w"], ["a2", "z"]] }]));
        assert_eq!(element_from_json(&v).unwrap(), e);
        assert!(element_from_json(&json!(3)).is_err());
        assert!(element_from_json(&json!(["a"])).is_err());
    }

    #[test]
    fn polynomials_round_trip() {
        let p = encode(&parse_poly("x^3y + 2 ; 3x^2z + y").unwrap()).unwrap();
        let v = poly_to_json(&p);
        assert_eq!(poly_from_json(&parse(&render(&v)).unwrap()).unwrap(), p);
        let m = CartesianMorphism::identity(&p);
        assert_eq!(cartesian_from_json(&cartesian_to_json(&m)).unwrap(), m);
    }

    #[test]
    fn rejects_bad_graphs() {
        let mut v = poly_to_json(&encode(&parse_poly("x").unwrap()).unwrap());
        v["p3"] = json!([]);
        assert!(poly_from_json(&v).is_err());
        v.as_object_mut().unwrap().remove("p3");
        assert!(matches!(poly_from_json(&v), Err(Error::Json(_))));
    }
}
