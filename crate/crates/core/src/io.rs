//! JSON reading and writing of instances and solutions.

use std::collections::HashMap;
use std::path::Path;

use num_rational::BigRational;
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::hull::AdditionalConstraint;
use crate::instance::{Assignment, Instance, ItemId, Knapsack, Solution};
use crate::num::{common_scale, rational_from_json, scaled_to_json};
use crate::oracles::{Objective, ObjectiveKind};

fn field<'a>(obj: &'a Map<String, Value>, key: &str, ctx: &str) -> Result<&'a Value> {
    obj.get(key).ok_or_else(|| Error::parse(ctx, format!("missing field `{key}`")))
}

fn as_object<'a>(v: &'a Value, ctx: &str) -> Result<&'a Map<String, Value>> {
    v.as_object().ok_or_else(|| Error::parse(ctx, "expected an object"))
}

fn as_array<'a>(v: &'a Value, ctx: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| Error::parse(ctx, "expected a list"))
}

fn as_usize(v: &Value, ctx: &str) -> Result<usize> {
    v.as_u64()
        .map(|x| x as usize)
        .ok_or_else(|| Error::parse(ctx, "expected a non-negative integer"))
}

fn label_of(v: &Value, ctx: &str) -> Result<String> {
    match v {
        Value::String(s) => Ok(s.clone()),
        Value::Number(n) => Ok(n.to_string()),
        _ => Err(Error::parse(ctx, "expected a label")),
    }
}

fn numbers(v: &Value, ctx: &str) -> Result<Vec<BigRational>> {
    as_array(v, ctx)?
        .iter()
        .enumerate()
        .map(|(k, x)| rational_from_json(x, &format!("{ctx}[{k}]")))
        .collect()
}

fn item_ref(v: &Value, index: &HashMap<String, ItemId>, n: usize, ctx: &str) -> Result<ItemId> {
    match v {
        Value::String(s) => index.get(s).copied().ok_or_else(|| Error::parse(ctx, format!("unknown item {s:?}"))),
        Value::Number(_) => {
            let i = as_usize(v, ctx)?;
            if i < n {
                Ok(i)
            } else {
                Err(Error::parse(ctx, format!("item index {i} out of range")))
            }
        }
        _ => Err(Error::parse(ctx, "expected an item label or index")),
    }
}

pub fn parse_instance(text: &str) -> Result<Instance> {
    let root: Value = serde_json::from_str(text)
        .map_err(|e| Error::parse(format!("line {} column {}", e.line(), e.column()), e.to_string()))?;
    instance_from_value(&root)
}

pub fn instance_from_value(root: &Value) -> Result<Instance> {
    let root = as_object(root, "instance")?;
    let labels: Vec<String> = as_array(field(root, "items", "instance")?, "items")?
        .iter()
        .enumerate()
        .map(|(k, v)| label_of(v, &format!("items[{k}]")))
        .collect::<Result<_>>()?;
    let n = labels.len();
    let index: HashMap<String, ItemId> = labels.iter().enumerate().map(|(i, l)| (l.clone(), i)).collect();

    let mut constraints = Vec::new();
    for (t, c) in as_array(field(root, "constraints", "instance")?, "constraints")?.iter().enumerate() {
        let ctx = format!("constraints[{t}]");
        let c = as_object(c, &ctx)?;
        let weights = numbers(field(c, "weights", &ctx)?, &format!("{ctx}.weights"))?;
        if weights.len() != n {
            return Err(Error::parse(
                format!("{ctx}.weights"),
                format!("{} weights for {n} items", weights.len()),
            ));
        }
        let mut caps = Vec::new();
        let mut bin_labels = Vec::new();
        for (b, bin) in as_array(field(c, "bins", &ctx)?, &format!("{ctx}.bins"))?.iter().enumerate() {
            let bctx = format!("{ctx}.bins[{b}]");
            match bin {
                Value::Object(o) => {
                    let id = match o.get("id") {
                        Some(v) => label_of(v, &format!("{bctx}.id"))?,
                        None => format!("b{b}"),
                    };
                    let cap = o.get("capacity").ok_or_else(|| {
                        Error::parse(&bctx, format!("bin {id:?} has no capacity"))
                    })?;
                    caps.push(rational_from_json(cap, &format!("{bctx}.capacity"))?);
                    bin_labels.push(id);
                }
                other => {
                    caps.push(rational_from_json(other, &bctx)?);
                    bin_labels.push(format!("b{b}"));
                }
            }
        }
        let mut all = weights.clone();
        all.extend(caps.iter().cloned());
        let scaled = common_scale(&all, &ctx)?;
        let (w, cap) = scaled.values.split_at(n);
        constraints.push(Knapsack {
            weights: w.to_vec(),
            capacities: cap.to_vec(),
            scale: scaled.scale,
            bin_labels,
        });
    }

    let objective = parse_objective(field(root, "objective", "instance")?, n)?;
    let additional = match root.get("additional") {
        None | Some(Value::Null) => AdditionalConstraint::Free,
        Some(v) => parse_additional(v, &index, n)?,
    };
    Instance::new(labels, constraints, objective, additional)
}

fn parse_objective(v: &Value, n: usize) -> Result<Objective> {
    let ctx = "objective";
    let o = as_object(v, ctx)?;
    let kind = field(o, "kind", ctx)?.as_str().ok_or_else(|| Error::parse("objective.kind", "expected a string"))?;
    let (kind, scale) = match kind {
        "modular" => {
            let offset = match o.get("offset") {
                Some(v) => rational_from_json(v, "objective.offset")?,
                None => BigRational::from_integer(0.into()),
            };
            let mut all = vec![offset];
            all.extend(numbers(field(o, "profits", ctx)?, "objective.profits")?);
            let s = common_scale(&all, ctx)?;
            (ObjectiveKind::Modular { offset: s.values[0], profits: s.values[1..].to_vec() }, s.scale)
        }
        "coverage" => {
            let universe = numbers(field(o, "universe", ctx)?, "objective.universe")?;
            let covers = as_array(field(o, "covers", ctx)?, "objective.covers")?
                .iter()
                .enumerate()
                .map(|(i, c)| {
                    let cctx = format!("objective.covers[{i}]");
                    as_array(c, &cctx)?.iter().map(|e| as_usize(e, &cctx)).collect::<Result<Vec<_>>>()
                })
                .collect::<Result<Vec<_>>>()?;
            let s = common_scale(&universe, ctx)?;
            (ObjectiveKind::Coverage { universe: s.values, covers }, s.scale)
        }
        "cut" => {
            let vertices = as_usize(field(o, "vertices", ctx)?, "objective.vertices")?;
            let mut ends = Vec::new();
            let mut weights = Vec::new();
            for (k, e) in as_array(field(o, "edges", ctx)?, "objective.edges")?.iter().enumerate() {
                let ectx = format!("objective.edges[{k}]");
                let e = as_array(e, &ectx)?;
                if e.len() != 3 {
                    return Err(Error::parse(ectx, "expected [u, v, weight]"));
                }
                ends.push((as_usize(&e[0], &ectx)?, as_usize(&e[1], &ectx)?));
                weights.push(rational_from_json(&e[2], &ectx)?);
            }
            let item_vertex = as_array(field(o, "item_vertex", ctx)?, "objective.item_vertex")?
                .iter()
                .map(|v| as_usize(v, "objective.item_vertex"))
                .collect::<Result<Vec<_>>>()?;
            let s = common_scale(&weights, ctx)?;
            let edges = ends.into_iter().zip(s.values).map(|((u, v), w)| (u, v, w)).collect();
            (ObjectiveKind::Cut { vertices, edges, item_vertex }, s.scale)
        }
        "table" => {
            let values = numbers(field(o, "values", ctx)?, "objective.values")?;
            let s = common_scale(&values, ctx)?;
            (ObjectiveKind::Table { values: s.values }, s.scale)
        }
        other => return Err(Error::parse("objective.kind", format!("unknown objective kind {other:?}"))),
    };
    let objective = Objective::new(kind, scale)?;
    if crate::oracles::SetFunction::ground_size(&objective) != n {
        return Err(Error::parse(ctx, format!("objective does not describe {n} items")));
    }
    Ok(objective)
}

fn parse_additional(v: &Value, index: &HashMap<String, ItemId>, n: usize) -> Result<AdditionalConstraint> {
    let ctx = "additional";
    let o = as_object(v, ctx)?;
    let kind = field(o, "kind", ctx)?.as_str().ok_or_else(|| Error::parse("additional.kind", "expected a string"))?;
    match kind {
        "free" => Ok(AdditionalConstraint::Free),
        "uniform" => Ok(AdditionalConstraint::Uniform { rank: as_usize(field(o, "rank", ctx)?, "additional.rank")? }),
        "partition" => {
            let classes = as_array(field(o, "classes", ctx)?, "additional.classes")?
                .iter()
                .enumerate()
                .map(|(k, c)| {
                    let cctx = format!("additional.classes[{k}]");
                    as_array(c, &cctx)?.iter().map(|i| item_ref(i, index, n, &cctx)).collect::<Result<Vec<_>>>()
                })
                .collect::<Result<Vec<_>>>()?;
            let caps = as_array(field(o, "caps", ctx)?, "additional.caps")?
                .iter()
                .map(|c| as_usize(c, "additional.caps"))
                .collect::<Result<Vec<_>>>()?;
            Ok(AdditionalConstraint::Partition { classes, caps })
        }
        "matroid_intersection" | "intersection" | "matching" => Err(Error::Unsupported(format!(
            "additional constraint kind {kind:?} is not supported; use free, uniform or partition"
        ))),
        other => Err(Error::parse("additional.kind", format!("unknown constraint kind {other:?}"))),
    }
}

fn scaled_list(values: &[i128], scale: i128) -> Value {
    Value::Array(values.iter().map(|&v| scaled_to_json(v, scale)).collect())
}

pub fn instance_to_value(inst: &Instance) -> Value {
    let constraints: Vec<Value> = inst
        .constraints
        .iter()
        .map(|k| {
            let bins: Vec<Value> = k
                .capacities
                .iter()
                .enumerate()
                .map(|(b, &c)| {
                    if k.bin_labels[b] == format!("b{b}") {
                        scaled_to_json(c, k.scale)
                    } else {
                        json!({ "id": k.bin_labels[b], "capacity": scaled_to_json(c, k.scale) })
                    }
                })
                .collect();
            json!({ "weights": scaled_list(&k.weights, k.scale), "bins": bins })
        })
        .collect();
    let s = inst.objective.scale;
    let objective = match &inst.objective.kind {
        ObjectiveKind::Modular { offset, profits } => json!({
            "kind": "modular", "offset": scaled_to_json(*offset, s), "profits": scaled_list(profits, s)
        }),
        ObjectiveKind::Coverage { universe, covers } => json!({
            "kind": "coverage", "universe": scaled_list(universe, s), "covers": covers
        }),
        ObjectiveKind::Cut { vertices, edges, item_vertex } => json!({
            "kind": "cut",
            "vertices": vertices,
            "edges": edges.iter().map(|&(u, v, w)| json!([u, v, scaled_to_json(w, s)])).collect::<Vec<_>>(),
            "item_vertex": item_vertex
        }),
        ObjectiveKind::Table { values } => json!({ "kind": "table", "values": scaled_list(values, s) }),
    };
    let additional = match &inst.additional {
        AdditionalConstraint::Free => json!({ "kind": "free" }),
        AdditionalConstraint::Uniform { rank } => json!({ "kind": "uniform", "rank": rank }),
        AdditionalConstraint::Partition { classes, caps } => json!({
            "kind": "partition",
            "classes": classes.iter().map(|c| c.iter().map(|&i| inst.labels[i].clone()).collect::<Vec<_>>()).collect::<Vec<_>>(),
            "caps": caps
        }),
    };
    json!({ "items": inst.labels, "constraints": constraints, "objective": objective, "additional": additional })
}

pub fn instance_to_string(inst: &Instance) -> String {
    serde_json::to_string_pretty(&instance_to_value(inst)).expect("serializable instance")
}

pub fn load_instance(path: &Path) -> Result<Instance> {
    let text = std::fs::read_to_string(path)?;
    parse_instance(&text)
}

pub fn save_instance(inst: &Instance, path: &Path) -> Result<()> {
    std::fs::write(path, instance_to_string(inst) + "\n")?;
    Ok(())
}

pub fn solution_to_value(sol: &Solution, inst: &Instance) -> Value {
    let label = |i: &ItemId| inst.labels[*i].clone();
    json!({
        "selected": sol.selected.iter().map(label).collect::<Vec<_>>(),
        "assignments": sol.assignments.iter().map(|a| {
            a.bins.iter().map(|b| b.iter().map(label).collect::<Vec<_>>()).collect::<Vec<_>>()
        }).collect::<Vec<_>>()
    })
}

pub fn solution_to_string(sol: &Solution, inst: &Instance) -> String {
    serde_json::to_string_pretty(&solution_to_value(sol, inst)).expect("serializable solution")
}

pub fn parse_solution(text: &str, inst: &Instance) -> Result<Solution> {
    let root: Value = serde_json::from_str(text)
        .map_err(|e| Error::parse(format!("line {} column {}", e.line(), e.column()), e.to_string()))?;
    let root = as_object(&root, "solution")?;
    let index: HashMap<String, ItemId> = inst.labels.iter().enumerate().map(|(i, l)| (l.clone(), i)).collect();
    let n = inst.n();
    let mut selected = as_array(field(root, "selected", "solution")?, "selected")?
        .iter()
        .map(|v| item_ref(v, &index, n, "selected"))
        .collect::<Result<Vec<_>>>()?;
    selected.sort_unstable();
    let mut assignments = Vec::new();
    for (t, a) in as_array(field(root, "assignments", "solution")?, "assignments")?.iter().enumerate() {
        let ctx = format!("assignments[{t}]");
        let bins = as_array(a, &ctx)?
            .iter()
            .enumerate()
            .map(|(b, items)| {
                let bctx = format!("{ctx}[{b}]");
                as_array(items, &bctx)?.iter().map(|v| item_ref(v, &index, n, &bctx)).collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        assignments.push(Assignment { bins });
    }
    Ok(Solution { selected, assignments })
}

pub fn load_solution(path: &Path, inst: &Instance) -> Result<Solution> {
    parse_solution(&std::fs::read_to_string(path)?, inst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracles::SetFunction;

    const SAMPLE: &str = r#"{
        "items": ["a", "b", "c"],
        "constraints": [
            {"weights": ["0.35", 1, "0.5"], "bins": [1, {"id": "big", "capacity": "2.5"}]}
        ],
        "objective": {"kind": "coverage", "universe": [1, "0.5"], "covers": [[0], [1], [0, 1]]},
        "additional": {"kind": "partition", "classes": [["a", "b"], ["c"]], "caps": [1, 1]}
    }"#;

    #[test]
    fn parses_exact_decimals() {
        let inst = parse_instance(SAMPLE).unwrap();
        let k = &inst.constraints[0];
        assert_eq!(k.scale, 20);
        assert_eq!(k.weights, vec![7, 20, 10]);
        assert_eq!(k.capacities, vec![20, 50]);
        assert_eq!(k.bin_labels, vec!["b0", "big"]);
        assert_eq!(inst.objective.value_scaled(&[2]), 3);
        assert_eq!(inst.objective.scale, 2);
    }

    #[test]
    fn round_trip_is_identity() {
        let inst = parse_instance(SAMPLE).unwrap();
        let again = parse_instance(&instance_to_string(&inst)).unwrap();
        assert_eq!(inst, again);
    }

    #[test]
    fn missing_capacity_names_bin() {
        let text = SAMPLE.replace(r#"{"id": "big", "capacity": "2.5"}"#, r#"{"id": "big"}"#);
        let err = parse_instance(&text).unwrap_err().to_string();
        assert!(err.contains("big"), "{err}");
        let text = SAMPLE.replace(r#"[1, {"id""#, r#"[null, {"id""#);
        let err = parse_instance(&text).unwrap_err().to_string();
        assert!(err.contains("constraints[0].bins[0]"), "{err}");
    }

    #[test]
    fn rejects_unsupported_constraint_kinds() {
        let text = SAMPLE.replace(r#""kind": "partition""#, r#""kind": "matroid_intersection""#);
        assert!(matches!(parse_instance(&text), Err(Error::Unsupported(_))));
        let text = SAMPLE.replace(r#""kind": "partition""#, r#""kind": "matching""#);
        assert!(matches!(parse_instance(&text), Err(Error::Unsupported(_))));
    }

    #[test]
    fn solution_round_trip() {
        let inst = parse_instance(SAMPLE).unwrap();
        let sol = Solution { selected: vec![0, 2], assignments: vec![Assignment { bins: vec![vec![0], vec![2]] }] };
        assert!(sol.is_feasible(&inst));
        let back = parse_solution(&solution_to_string(&sol, &inst), &inst).unwrap();
        assert_eq!(sol, back);
    }
}
