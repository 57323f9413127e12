mod common;

use common::Pipeline;
use moot_core::antichain::Antichain;
use moot_core::diag::Span;
use moot_core::typeflow::{
    classify_typing, flow_symbolic, run_typing, Classification, FlowMemo, RunOptions, SyntaxGraph, Typing,
};

fn field_flow(p: &Pipeline, field: &str, arg: &[&str], result: &[&str]) -> (Vec<String>, Vec<String>) {
    let label = p.rels.field(field).unwrap();
    let memo = FlowMemo::new();
    let (a, b) = flow_symbolic(
        &memo,
        label,
        p.rels.table.get(label),
        &p.chain(arg),
        &p.chain(result),
        p.poset(),
    );
    (p.show(&a), p.show(&b))
}

#[test]
fn field_select_flows_forward() {
    let p = Pipeline::load("running.moot");
    assert_eq!(field_flow(&p, "min", &["Ival"], &["any"]), (vec!["Ival".into()], vec!["int".into()]));
}

#[test]
fn field_select_flows_backward() {
    let p = Pipeline::load("running.moot");
    assert_eq!(field_flow(&p, "min", &["any"], &["int"]), (vec!["Ival".into()], vec!["int".into()]));
}

#[test]
fn field_select_flows_both_ways() {
    let p = Pipeline::load("running.moot");
    assert_eq!(
        field_flow(&p, "delta", &["Ival"], &["any"]),
        (vec!["DirIval".into()], vec!["int".into()])
    );
}

/// DATA(x, y): nodes 1 and 2 are the arguments, 3 the signature, 4 the
/// result.
fn data_call(p: &Pipeline, init: [&[&str]; 4]) -> Vec<Vec<String>> {
    let labels = p.rels.call("DATA", 2).unwrap();
    let mut g = SyntaxGraph::new();
    let n: Vec<_> = ["x", "y", "signature", "result"]
        .iter()
        .map(|r| g.add_node(Span::synthetic(), *r))
        .collect();
    g.add_edge(n[0], n[2], labels.args[0]);
    g.add_edge(n[1], n[2], labels.args[1]);
    g.add_edge(n[3], n[2], labels.ret);
    let mut typing = Typing::uniform(4, Antichain::empty());
    for (i, spellings) in init.iter().enumerate() {
        typing.set(n[i], p.chain(spellings));
    }
    let out = run_typing(&g, &p.rels.table, p.poset(), &FlowMemo::new(), typing, RunOptions::default());
    n.iter().map(|&x| p.show(out.typing.get(x))).collect()
}

#[test]
fn data_call_with_unknown_container_stays_ambiguous() {
    let p = Pipeline::load("running.moot");
    let got = data_call(&p, [&["any"], &["int"], &["any(*)(Iterable, Iterator)"], &["any"]]);
    assert_eq!(got[0], ["Ival", "int"]);
    assert_eq!(got[1], ["int"]);
    assert_eq!(got[2], ["int(*)(Ival+, int)", "int(*)(int, int)"]);
    assert_eq!(got[3], ["int"]);
}

#[test]
fn data_call_with_directed_interval_resolves() {
    let p = Pipeline::load("running.moot");
    let got = data_call(&p, [&["DirIval"], &["any"], &["any(*)(Iterable, Iterator)"], &["any"]]);
    assert_eq!(got[0], ["DirIval"]);
    assert_eq!(got[1], ["int"]);
    assert_eq!(got[2], ["int(*)(Ival+, int)"]);
    assert_eq!(got[3], ["int"]);
}

#[test]
fn ambiguity_is_classified() {
    let p = Pipeline::load("running.moot");
    let labels = p.rels.call("DATA", 2).unwrap();
    let mut g = SyntaxGraph::new();
    let x = g.add_node(Span::synthetic(), "x");
    let s = g.add_node(Span::synthetic(), "signature");
    g.add_edge(x, s, labels.args[0]);
    let mut typing = Typing::uniform(2, p.chain(&["any"]));
    typing.set(s, p.chain(&["int(*)(int, int)", "int(*)(Ival+, int)"]));
    let out = run_typing(&g, &p.rels.table, p.poset(), &FlowMemo::new(), typing, RunOptions::default());
    assert!(matches!(classify_typing(&out.typing), Classification::Ambiguous(_)));
}
