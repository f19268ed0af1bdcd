//! Command implementations. Each returns an [`Outcome`] whose output part is
//! deterministic in the inputs and the configuration.

use std::collections::BTreeMap;

use anyhow::{bail, Context, Result};
use log::{debug, info};
use serde_json::{json, Value};

use ptolemy::analyzer::{
    departure_profile, flip_graph_diameter, min_corridor_k, neighbor_paths, polygon_diameter_by_matrix, polygon_move_graph,
    sample_words, CombingPath, CorridorOutcome, DistanceOracle,
};
use ptolemy::braided::{kernel_braid, project_to_t, tstar_combing, StrandAutomorphism, TStarElement};
use ptolemy::combing::{combing, reduced_combing};
use ptolemy::group::{eval_moves, eval_tree_pair, eval_word, inverse, multiply, to_tree_pair, GeneratorWord, TElement};
use ptolemy::mosher::mosher_flip_sequence;
use ptolemy::state::{Move, MoveWord};

use crate::report::{Budgets, Outcome};

fn element_json(z: &TElement) -> Value {
    json!({
        "identity": z.is_identity(),
        "fingerprint": z.state().fingerprint(),
        "state": z.state().normalize().to_json(),
        "treePair": to_tree_pair(z).to_json(),
    })
}

fn star_json(z: &TStarElement) -> Value {
    json!({
        "identity": z.is_identity(),
        "fingerprint": z.state().fingerprint(),
        "state": z.state().to_json(),
        "projectionFingerprint": project_to_t(z).state().fingerprint(),
    })
}

fn automorphism_json(a: &StrandAutomorphism) -> Value {
    let images: BTreeMap<String, Vec<Value>> = a
        .images
        .iter()
        .map(|(e, w)| (e.address().to_string(), w.iter().map(|(g, x)| json!([g.address().to_string(), x])).collect()))
        .collect();
    json!({ "window": a.window.len(), "images": images })
}

fn element_lines(z: &Value) -> Vec<String> {
    vec![format!("identity: {}", z["identity"]), format!("fingerprint: {}", z["fingerprint"].as_str().unwrap_or(""))]
}

pub fn eval(w: &GeneratorWord, star: bool) -> Result<Outcome> {
    let output = if star { star_json(&TStarElement::from_word(w)) } else { element_json(&eval_word(w)) };
    Ok(Outcome { summary: element_lines(&output), output, inconclusive: false })
}

pub fn mult(x: &GeneratorWord, y: &GeneratorWord, star: bool) -> Result<Outcome> {
    let output = if star {
        let z = TStarElement::from_word(x).multiply(&TStarElement::from_word(y))?;
        if z.state() != TStarElement::from_word(&x.concat(y)).state() {
            bail!("product disagrees with the concatenated word");
        }
        star_json(&z)
    } else {
        let z = multiply(&eval_word(x), &eval_word(y));
        if z != eval_word(&x.concat(y)) {
            bail!("tree-pair product disagrees with the concatenated word");
        }
        element_json(&z)
    };
    Ok(Outcome { summary: element_lines(&output), output, inconclusive: false })
}

pub fn inv(w: &GeneratorWord, star: bool) -> Result<Outcome> {
    let (mut output, word) = if star {
        let z = TStarElement::from_word(w).inverse()?;
        let word = tstar_combing(&z)?.word;
        (star_json(&z), word)
    } else {
        let z = inverse(&eval_word(w));
        if z != eval_word(&w.inverse()) {
            bail!("tree-pair inverse disagrees with the inverted word");
        }
        let word = GeneratorWord::from_moves(&reduced_combing(&z));
        (element_json(&z), word)
    };
    output["word"] = json!(word.to_string());
    let mut summary = element_lines(&output);
    summary.push(format!("word: {word}"));
    Ok(Outcome { output, summary, inconclusive: false })
}

pub fn wp(w: &GeneratorWord, star: bool, emit_trace: bool) -> Result<Outcome> {
    let mut summary = Vec::new();
    let output = if star {
        let z = TStarElement::from_word(w);
        let projection_trivial = eval_tree_pair(w).is_identity();
        if projection_trivial != project_to_t(&z).is_identity() {
            bail!("state and tree-pair routes disagree on the projection of {w}");
        }
        let trivial = z.is_identity();
        summary.push(format!("trivial: {trivial}"));
        let mut out = json!({ "trivial": trivial, "projectionTrivial": projection_trivial });
        if !trivial {
            out["witness"] = if projection_trivial {
                let b = kernel_braid(&z)?;
                let a = StrandAutomorphism::of_homeo(&b.homeo()?);
                summary.push(format!("kernel braid: {b}"));
                json!({ "kernelBraid": b.to_json(), "kernelBraidText": b.to_string(), "automorphism": automorphism_json(&a) })
            } else {
                let p = project_to_t(&z);
                summary.push("projection to T is nontrivial".into());
                json!({ "projection": element_json(&p) })
            };
        }
        out
    } else {
        let z = eval_word(w);
        let trivial = z.is_identity();
        if trivial != eval_tree_pair(w).is_identity() {
            bail!("state and tree-pair routes disagree on {w}");
        }
        summary.push(format!("trivial: {trivial}"));
        let mut out = json!({ "trivial": trivial });
        if !trivial {
            out["witness"] = json!({ "treePair": to_tree_pair(&z).to_json(), "fingerprint": z.state().fingerprint() });
        }
        if emit_trace {
            out["trace"] = mosher_flip_sequence(&z).to_json();
        }
        out
    };
    Ok(Outcome { output, summary, inconclusive: false })
}

pub fn comb(w: &GeneratorWord, star: bool, reduced: bool, emit_trace: bool) -> Result<Outcome> {
    let mut summary = Vec::new();
    let output = if star {
        let z = TStarElement::from_word(w);
        let c = tstar_combing(&z)?;
        if TStarElement::from_moves(&c.moves).state() != z.state() {
            bail!("combing does not evaluate to the element");
        }
        summary.push(format!("moves: {}", c.moves));
        summary.push(format!("kernel braid: {}", c.braid));
        json!({
            "moves": c.moves.to_string(),
            "length": c.moves.len(),
            "word": c.word.to_string(),
            "combing": c.combing.to_string(),
            "kernelBraid": c.braid.to_json(),
        })
    } else {
        let z = eval_word(w);
        let moves = if reduced { reduced_combing(&z) } else { combing(&z) };
        if eval_moves(&moves) != z {
            bail!("combing does not evaluate to the element");
        }
        summary.push(format!("moves: {moves}"));
        let mut out = json!({
            "moves": moves.to_string(),
            "length": moves.len(),
            "word": GeneratorWord::from_moves(&moves).to_string(),
        });
        if emit_trace {
            out["trace"] = mosher_flip_sequence(&z).to_json();
        }
        out
    };
    Ok(Outcome { output, summary, inconclusive: false })
}

fn corridor_json(r: &ptolemy::analyzer::CorridorReport) -> Value {
    serde_json::to_value(r).expect("corridor reports serialize")
}

pub fn corridor_pair(a: &GeneratorWord, b: &GeneratorWord, budgets: &Budgets) -> Result<Outcome> {
    let pa = CombingPath::from_identity(&reduced_combing(&eval_word(a)));
    let pb = CombingPath::from_identity(&reduced_combing(&eval_word(b)));
    let mut oracle = DistanceOracle::new(budgets.oracle_depth);
    let r = min_corridor_k(&pa, &pb, budgets.kmax, budgets.bfs_radius, &mut oracle)?;
    let inconclusive = r.outcome == CorridorOutcome::Inconclusive;
    let summary = vec![format!("outcome: {:?}", r.outcome), format!("k: {:?}", r.k_feasible)];
    Ok(Outcome { output: corridor_json(&r), summary, inconclusive })
}

/// Corridor widths between the reduced combings of sampled `g` and of its
/// neighbours `gα` and `gβ`.
pub fn corridor_sampled(seed: u64, max_len: usize, budgets: &Budgets) -> Result<Outcome> {
    let mut oracle = DistanceOracle::new(budgets.oracle_depth);
    let (mut feasible, mut not_found, mut inconclusive, mut worst) = (0, 0, 0, 0);
    let mut cases = Vec::new();
    for (i, w) in sample_words(seed, budgets.sample_count, max_len).iter().enumerate() {
        let g = eval_word(w);
        for m in [Move::F, Move::R] {
            let (a, b) = neighbor_paths(&g, m);
            let r = min_corridor_k(&a, &b, budgets.kmax, budgets.bfs_radius, &mut oracle)?;
            debug!("sample {i} {w} {m:?}: {:?} k={:?}", r.outcome, r.k_feasible);
            match r.outcome {
                CorridorOutcome::Feasible => feasible += 1,
                CorridorOutcome::NotFound => not_found += 1,
                CorridorOutcome::Inconclusive => inconclusive += 1,
            }
            worst = worst.max(r.k_feasible.unwrap_or(0));
            cases.push(json!({ "word": w.to_string(), "move": m.letter().to_string(), "outcome": r.outcome, "k": r.k_feasible }));
        }
    }
    info!("corridor samples: {feasible} feasible, {not_found} not found, {inconclusive} inconclusive");
    let output = json!({
        "pairs": cases.len(),
        "feasible": feasible,
        "notFound": not_found,
        "inconclusive": inconclusive,
        "maxK": worst,
        "maxLen": max_len,
        "cases": cases,
    });
    let summary = vec![
        format!("pairs: {}", feasible + not_found + inconclusive),
        format!("feasible: {feasible}, not found: {not_found}, inconclusive: {inconclusive}"),
        format!("largest width: {worst}"),
    ];
    Ok(Outcome { output, summary, inconclusive: inconclusive > 0 })
}

pub fn polygon_diameter(n: usize) -> Result<Outcome> {
    let r = polygon_move_graph(n)?;
    let by_matrix = polygon_diameter_by_matrix(n);
    if by_matrix.is_some_and(|d| d != r.diameter) {
        bail!("matrix and BFS diameters disagree");
    }
    let summary = vec![format!("n: {n}"), format!("states: {}", r.states), format!("diameter: {}", r.diameter)];
    let mut output = serde_json::to_value(&r).context("serializing the polygon report")?;
    output["diameterByMatrix"] = json!(by_matrix);
    Ok(Outcome { output, summary, inconclusive: false })
}

pub fn departure(seed: u64, max_len: usize, rmax: usize, budgets: &Budgets) -> Result<Outcome> {
    let words = sample_words(seed, budgets.sample_count, max_len);
    let elements: Vec<TElement> = words.iter().map(eval_word).collect();
    let paths = |f: fn(&TElement) -> MoveWord| -> Vec<CombingPath> { elements.iter().map(|z| CombingPath::from_identity(&f(z))).collect() };
    let reduced = departure_profile(&paths(reduced_combing), rmax)?;
    let raw = departure_profile(&paths(combing), rmax)?;
    let summary = vec![format!("reduced D: {:?}", reduced.d), format!("unreduced D: {:?}", raw.d)];
    let output = json!({
        "maxLen": max_len,
        "reduced": serde_json::to_value(&reduced)?,
        "unreduced": serde_json::to_value(&raw)?,
    });
    Ok(Outcome { output, summary, inconclusive: false })
}

pub fn flipdist(n: usize) -> Result<Outcome> {
    if !(4..=13).contains(&n) {
        bail!("polygon size {n} outside 4..=13");
    }
    let d = flip_graph_diameter(n);
    let bound = (n >= 13).then(|| 2 * n - 10);
    let mut summary = vec![format!("n: {n}"), format!("diameter: {d}")];
    if let Some(b) = bound {
        summary.push(format!("2n-10: {b}"));
    }
    Ok(Outcome { output: json!({ "n": n, "diameter": d, "bound2nMinus10": bound }), summary, inconclusive: false })
}
