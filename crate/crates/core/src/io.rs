//! JSON encodings of matrices, pants reps, surfaces, labelings and surface
//! representations.
//!
//! Floats are written with 17 significant digits, so every value read back is
//! bit-identical to the one written.

use std::str::FromStr;

use serde_json::{json, Map, Number, Value};

use crate::error::{Error, Result};
use crate::folding::Labeling;
use crate::moebius::MoebiusTransform;
use crate::pants::PantsRep;
use crate::presentation::Slot;
use crate::surface::{presentation_for, validate_decomposition, FNCoordinates, PantsDecomposition, SurfaceRep};

fn format_err(msg: impl Into<String>) -> Error {
    Error::Format(msg.into())
}

/// A float as a JSON number with 17 significant digits.
pub fn number(x: f64) -> Value {
    if !x.is_finite() {
        return Value::Null;
    }
    Value::Number(Number::from_str(&format!("{x:.16e}")).expect("scientific notation is valid JSON"))
}

fn get<'a>(v: &'a Value, key: &str) -> Result<&'a Value> {
    v.get(key).ok_or_else(|| format_err(format!("missing key \"{key}\"")))
}

fn as_f64(v: &Value, what: &str) -> Result<f64> {
    v.as_f64().ok_or_else(|| format_err(format!("{what} is not a number")))
}

pub fn matrix_to_json(g: &MoebiusTransform) -> Value {
    json!({ "m": g.entries().iter().map(|&x| number(x)).collect::<Vec<_>>() })
}

pub fn matrix_from_json(v: &Value) -> Result<MoebiusTransform> {
    let m = get(v, "m")?.as_array().ok_or_else(|| format_err("\"m\" is not an array"))?;
    if m.len() != 4 {
        return Err(format_err(format!("matrix has {} entries", m.len())));
    }
    let e: Vec<f64> = m.iter().map(|x| as_f64(x, "matrix entry")).collect::<Result<_>>()?;
    MoebiusTransform::new(e[0], e[1], e[2], e[3])
}

pub fn pants_to_json(rep: &PantsRep) -> Value {
    json!({ "alpha": matrix_to_json(&rep.alpha), "beta": matrix_to_json(&rep.beta) })
}

pub fn pants_from_json(v: &Value) -> Result<PantsRep> {
    Ok(PantsRep::new(matrix_from_json(get(v, "alpha")?)?, matrix_from_json(get(v, "beta")?)?))
}

fn decomposition_to_json(pd: &PantsDecomposition) -> Map<String, Value> {
    let ids = pd.ids();
    let cuffs: Vec<Value> =
        pd.cuffs().iter().map(|c| json!([[ids[c[0].pants], c[0].slot], [ids[c[1].pants], c[1].slot]])).collect();
    let mut m = Map::new();
    m.insert("pants".into(), json!(ids));
    m.insert("cuffs".into(), Value::Array(cuffs));
    m
}

/// Reads `pants` and `cuffs` and validates the decomposition.
pub fn decomposition_from_json(v: &Value) -> Result<PantsDecomposition> {
    let ids: Vec<String> = get(v, "pants")?
        .as_array()
        .ok_or_else(|| format_err("\"pants\" is not an array"))?
        .iter()
        .map(|x| match x {
            Value::String(s) => Ok(s.clone()),
            Value::Number(n) => Ok(n.to_string()),
            _ => Err(format_err("pants ids must be strings")),
        })
        .collect::<Result<_>>()?;
    let slot = |s: &Value| -> Result<Slot> {
        let pair = s.as_array().filter(|a| a.len() == 2).ok_or_else(|| format_err("a cuff side is not [pantsId, slot]"))?;
        let id = match &pair[0] {
            Value::String(s) => s.clone(),
            Value::Number(n) => n.to_string(),
            _ => return Err(format_err("pants id must be a string")),
        };
        let pants = ids.iter().position(|p| *p == id).ok_or_else(|| Error::BadReference(format!("pants {id}")))?;
        let slot = pair[1].as_u64().ok_or_else(|| format_err("slot must be a nonnegative integer"))? as usize;
        Ok(Slot::new(pants, slot))
    };
    let cuffs = get(v, "cuffs")?
        .as_array()
        .ok_or_else(|| format_err("\"cuffs\" is not an array"))?
        .iter()
        .map(|c| {
            let pair = c.as_array().filter(|a| a.len() == 2).ok_or_else(|| format_err("a cuff is not a pair of sides"))?;
            Ok([slot(&pair[0])?, slot(&pair[1])?])
        })
        .collect::<Result<Vec<_>>>()?;
    let pd = PantsDecomposition::new(ids, cuffs);
    validate_decomposition(&pd)?;
    Ok(pd)
}

/// Per-cuff values given either as an array or as an object keyed by cuff
/// index.
fn per_cuff(v: &Value, count: usize, what: &str) -> Result<Vec<f64>> {
    match v {
        Value::Array(a) => {
            if a.len() != count {
                return Err(format_err(format!("{} {what} for {count} cuffs", a.len())));
            }
            a.iter().map(|x| as_f64(x, what)).collect()
        }
        Value::Object(m) => (0..count)
            .map(|i| as_f64(m.get(&i.to_string()).ok_or_else(|| format_err(format!("{what} missing cuff {i}")))?, what))
            .collect(),
        _ => Err(format_err(format!("\"{what}\" must be an array or an object"))),
    }
}

pub fn surface_to_json(pd: &PantsDecomposition, fnc: &FNCoordinates) -> Value {
    let mut m = decomposition_to_json(pd);
    let keyed = |xs: &[f64]| Value::Object(xs.iter().enumerate().map(|(i, &x)| (i.to_string(), number(x))).collect());
    m.insert("lengths".into(), keyed(&fnc.lengths));
    m.insert("twists".into(), keyed(&fnc.twists));
    Value::Object(m)
}

/// A surface: decomposition with Fenchel–Nielsen coordinates. Twists
/// default to zero.
pub fn surface_from_json(v: &Value) -> Result<(PantsDecomposition, FNCoordinates)> {
    let pd = decomposition_from_json(v)?;
    let n = pd.cuff_count();
    let lengths = per_cuff(get(v, "lengths")?, n, "lengths")?;
    let twists = match v.get("twists") {
        Some(t) => per_cuff(t, n, "twists")?,
        None => vec![0.0; n],
    };
    Ok((pd, FNCoordinates::new(lengths, twists)?))
}

pub fn labeling_to_json(pd: &PantsDecomposition, labels: &Labeling) -> Value {
    let m: Map<String, Value> = pd.ids().iter().zip(labels.labels()).map(|(id, &l)| (id.clone(), json!(l))).collect();
    json!({ "labels": m })
}

pub fn labeling_from_json(v: &Value, pd: &PantsDecomposition) -> Result<Labeling> {
    let m = get(v, "labels")?.as_object().ok_or_else(|| format_err("\"labels\" is not an object"))?;
    for key in m.keys() {
        if !pd.ids().contains(key) {
            return Err(Error::BadReference(format!("pants {key}")));
        }
    }
    let labels = pd
        .ids()
        .iter()
        .map(|id| {
            let l = m.get(id).ok_or_else(|| format_err(format!("no label for pants {id}")))?;
            l.as_i64().ok_or_else(|| format_err(format!("label of pants {id} is not an integer")))
        })
        .collect::<Result<Vec<_>>>()?;
    Labeling::new(labels)
}

/// Dump of a surface representation: its decomposition, presentation,
/// generator images, and the per-pants and stable-letter images it is
/// rebuilt from.
pub fn rep_to_json(rep: &SurfaceRep) -> Value {
    let pres = rep.presentation();
    json!({
        "surface": Value::Object(decomposition_to_json(rep.decomposition())),
        "presentation": {
            "genus": pres.genus,
            "basis": pres.basis.iter().map(|&i| pres.original_name(i)).collect::<Vec<_>>(),
            "relator": pres.relator.to_string(),
        },
        "generators": rep.generators().iter().map(matrix_to_json).collect::<Vec<_>>(),
        "pants": rep.pants_reps().iter().map(pants_to_json).collect::<Vec<_>>(),
        "stable": rep.stable_letters().iter().map(matrix_to_json).collect::<Vec<_>>(),
    })
}

pub fn rep_from_json(v: &Value) -> Result<SurfaceRep> {
    let pd = decomposition_from_json(get(v, "surface")?)?;
    let presentation = presentation_for(&pd)?;
    let list = |key: &str| -> Result<&Vec<Value>> {
        get(v, key)?.as_array().ok_or_else(|| format_err(format!("\"{key}\" is not an array")))
    };
    let pants = list("pants")?.iter().map(pants_from_json).collect::<Result<Vec<_>>>()?;
    let stable = list("stable")?.iter().map(matrix_from_json).collect::<Result<Vec<_>>>()?;
    if let Some(r) = v.get("presentation").and_then(|p| p.get("relator")).and_then(Value::as_str) {
        if r != presentation.relator.to_string() {
            return Err(Error::PresentationMismatch);
        }
    }
    SurfaceRep::from_parts(pd, presentation, pants, stable)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::folding::fold_surface;
    use crate::surface::assemble_fuchsian;

    #[test]
    fn numbers_round_trip_exactly() {
        for x in [0.1, -1.0 / 3.0, 1e-300, 6.02e23, f64::MIN_POSITIVE, -0.0] {
            let v = number(x);
            let back: Value = serde_json::from_str(&v.to_string()).unwrap();
            assert_eq!(back.as_f64().unwrap().to_bits(), x.to_bits(), "{x}");
        }
        assert_eq!(number(f64::NAN), Value::Null);
    }

    #[test]
    fn matrices_are_sign_normalized() {
        let g = MoebiusTransform::new(-2.0, -1.0, -1.0, -1.0).unwrap();
        let v = matrix_to_json(&g);
        assert!(v["m"][0].as_f64().unwrap() > 0.0);
        assert_eq!(matrix_from_json(&v).unwrap(), g);
        assert!(matrix_from_json(&json!({"m": [1, 2, 3]})).is_err());
        assert!(matrix_from_json(&json!({"m": [0, 1, 1, 0]})).is_err());
    }

    #[test]
    fn surfaces_and_labels() {
        let text = r#"{"pants": ["P", "Q"],
            "cuffs": [[["P", 0], ["Q", 0]], [["P", 1], ["Q", 1]], [["P", 2], ["Q", 2]]],
            "lengths": {"0": 1.0, "1": 1.5, "2": 2.0}}"#;
        let (pd, fnc) = surface_from_json(&serde_json::from_str(text).unwrap()).unwrap();
        assert_eq!(pd.genus(), 2);
        assert_eq!(fnc.lengths, vec![1.0, 1.5, 2.0]);
        assert_eq!(fnc.twists, vec![0.0; 3]);
        let again = surface_from_json(&surface_to_json(&pd, &fnc)).unwrap();
        assert_eq!(again, (pd.clone(), fnc));
        let labels = labeling_from_json(&json!({"labels": {"P": 1, "Q": 0}}), &pd).unwrap();
        assert_eq!(labels.labels(), &[1, 0]);
        assert_eq!(labeling_from_json(&labeling_to_json(&pd, &labels), &pd).unwrap(), labels);
        assert!(matches!(labeling_from_json(&json!({"labels": {"P": 1, "R": 0}}), &pd), Err(Error::BadReference(_))));
        assert!(matches!(labeling_from_json(&json!({"labels": {"P": 3, "Q": 0}}), &pd), Err(Error::BadLabel(3))));
        let bad = r#"{"pants": ["P", "Q"], "cuffs": [[["P", 0], ["Q", 0]]], "lengths": [1.0]}"#;
        assert!(matches!(surface_from_json(&serde_json::from_str(bad).unwrap()), Err(Error::UnmatchedSlot { .. })));
    }

    #[test]
    fn representations_round_trip_bit_identically() {
        let pd = PantsDecomposition::ring();
        let fnc = FNCoordinates::new(vec![1.0, 1.3, 0.7, 2.0, 1.1, 0.9], vec![0.2, -0.5, 0.0, 1.0, 0.3, -0.1]).unwrap();
        let j = assemble_fuchsian(&pd, &fnc).unwrap();
        let (_, rho) = fold_surface(&pd, &fnc, &Labeling::new(vec![1, 0, -1, 0]).unwrap()).unwrap();
        for rep in [j, rho] {
            let text = serde_json::to_string(&rep_to_json(&rep)).unwrap();
            let back = rep_from_json(&serde_json::from_str(&text).unwrap()).unwrap();
            for (a, b) in rep.generators().iter().zip(back.generators()) {
                assert_eq!(a.entries(), b.entries());
            }
            assert_eq!(serde_json::to_string(&rep_to_json(&back)).unwrap(), text);
        }
    }
}
