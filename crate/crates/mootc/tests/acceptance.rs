//! One line per acceptance criterion; the test fails if any line fails.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::io::Write;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use common::{
    naive_gfp, perf_setup, powerset_flow, random_antichain, random_cross_closed, random_instance, random_poset,
    random_relations, t, Pipeline,
};
use moot_core::antichain::Antichain;
use moot_core::diag::Span;
use moot_core::hierarchy::{greatest_fixed_point_of, CandidateSubsumption};
use moot_core::typeflow::{
    classify_typing, flow_naive, flow_symbolic, run_typing, Classification, FlowMemo, LabelId, NodeId, RunOptions,
    Schedule, SyntaxGraph, Typing,
};
use moot_core::universe::{RelationLabel, TypeRelation};
use mootc::{compile, CompileOutput, DriverConfig};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

const HIERARCHY_BUDGET_SECS: f64 = 1.0;
const SIMULATION_CASES: u64 = 500;
const FLOW_CASES: u64 = 1000;
const SCHEDULES_PER_GRAPH: usize = 20;
const CONFLUENCE_GRAPHS: u64 = 100;
const LAW_CASES: u64 = 300;
const MIN_MEMO_RATIO: f64 = 10.0;
const PERF_BUDGET_SECS: f64 = 5.0;

type Verdict = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn driver(name: &str) -> CompileOutput {
    let config = DriverConfig {
        file_name: name.to_string(),
        ..DriverConfig::default()
    };
    compile(&common::fixture(name), &config)
}

fn first_error(out: &CompileOutput) -> String {
    out.diagnostics
        .iter()
        .find(|d| d.is_error())
        .map(|d| d.message.clone())
        .unwrap_or_default()
}

/// Builds the emitted code with g++ and returns what it prints.
fn build_and_run(c: &str, dir: &Path, name: &str) -> Result<String, String> {
    let src = dir.join(format!("{name}.cpp"));
    let bin = dir.join(name);
    std::fs::write(&src, c).map_err(|e| e.to_string())?;
    let status = Command::new("g++")
        .args(["-w", "-x", "c++", src.to_str().unwrap(), "-o", bin.to_str().unwrap()])
        .output()
        .map_err(|e| format!("g++: {e}"))?;
    if !status.status.success() {
        return Err(String::from_utf8_lossy(&status.stderr).into_owned());
    }
    let run = Command::new(&bin).output().map_err(|e| e.to_string())?;
    Ok(String::from_utf8_lossy(&run.stdout).into_owned())
}

fn criterion_1() -> Verdict {
    let start = Instant::now();
    let out = driver("running.moot");
    let elapsed = start.elapsed().as_secs_f64();
    ensure(out.exit_code == 0, || first_error(&out))?;
    let (pt, order) = (out.types.as_ref().unwrap(), out.order.as_ref().unwrap());
    let u = &pt.universe;
    let pick = |names: &[&str]| -> Vec<_> { names.iter().map(|n| u.find(n).unwrap()).collect() };
    let base = pick(&["any", "Iterable", "Iterator", "Ival", "DirIval", "int"]);
    let covers: Vec<(String, String)> = order
        .covers_within(Some(&base))
        .iter()
        .map(|&(a, b)| (u.display(a), u.display(b)))
        .collect();
    let mut got: Vec<String> = covers.iter().map(|(a, b)| format!("{a}>{b}")).collect();
    got.sort();
    let want = ["Iterable>Ival", "Iterable>int", "Iterator>int", "Ival>DirIval", "any>Iterable", "any>Iterator"];
    ensure(got == want, || format!("base covers {got:?}"))?;
    let sigs = pick(&[
        "any(*)(Iterable, Iterator)",
        "int(*)(int, int)",
        "int(*)(Ival+, int)",
        "int(*)(DirIval+, int)",
    ]);
    let mut got: Vec<String> = order
        .covers_within(Some(&sigs))
        .iter()
        .map(|&(a, b)| format!("{}>{}", u.display(a), u.display(b)))
        .collect();
    got.sort();
    let want = [
        "any(*)(Iterable, Iterator)>int(*)(Ival+, int)",
        "any(*)(Iterable, Iterator)>int(*)(int, int)",
        "int(*)(Ival+, int)>int(*)(DirIval+, int)",
    ];
    ensure(got == want, || format!("DATA covers {got:?}"))?;
    ensure(elapsed < HIERARCHY_BUDGET_SECS, || format!("took {elapsed:.3}s"))?;
    Ok(format!("6 + 3 cover edges match, {elapsed:.3}s < {HIERARCHY_BUDGET_SECS}s"))
}

fn criterion_2() -> Verdict {
    let p = Pipeline::load("running.moot");
    let memo = FlowMemo::new();
    let field = |f: &str, a: &[&str], b: &[&str]| {
        let l = p.rels.field(f).unwrap();
        let (x, y) = flow_symbolic(&memo, l, p.rels.table.get(l), &p.chain(a), &p.chain(b), p.poset());
        (p.show(&x), p.show(&y))
    };
    let s = |v: &[&str]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>();
    ensure(field("min", &["Ival"], &["any"]) == (s(&["Ival"]), s(&["int"])), || "forward".into())?;
    ensure(field("min", &["any"], &["int"]) == (s(&["Ival"]), s(&["int"])), || "backward".into())?;
    ensure(field("delta", &["Ival"], &["any"]) == (s(&["DirIval"]), s(&["int"])), || "bidirectional".into())?;

    let labels = p.rels.call("DATA", 2).unwrap();
    let call = |init: [&[&str]; 4]| {
        let mut g = SyntaxGraph::new();
        let n: Vec<NodeId> = (0..4).map(|i| g.add_node(Span::synthetic(), format!("{}", i + 1))).collect();
        g.add_edge(n[0], n[2], labels.args[0]);
        g.add_edge(n[1], n[2], labels.args[1]);
        g.add_edge(n[3], n[2], labels.ret);
        let mut typing = Typing::uniform(4, Antichain::empty());
        for (i, names) in init.iter().enumerate() {
            typing.set(n[i], p.chain(names));
        }
        let out = run_typing(&g, &p.rels.table, p.poset(), &memo, typing, RunOptions::default());
        n.iter().map(|&x| p.show(out.typing.get(x))).collect::<Vec<_>>()
    };
    let top = "any(*)(Iterable, Iterator)";
    let c = call([&["any"], &["int"], &[top], &["any"]]);
    let want_c = vec![
        s(&["Ival", "int"]),
        s(&["int"]),
        s(&["int(*)(Ival+, int)", "int(*)(int, int)"]),
        s(&["int"]),
    ];
    ensure(c == want_c, || format!("typing 1: {c:?}"))?;
    let e = call([&["DirIval"], &["any"], &[top], &["any"]]);
    let want_e = vec![s(&["DirIval"]), s(&["int"]), s(&["int(*)(Ival+, int)"]), s(&["int"])];
    ensure(e == want_e, || format!("typing 2: {e:?}"))?;
    Ok("forward, backward, bidirectional and both call typings match".into())
}

fn criterion_3(dir: &Path) -> Verdict {
    let out = driver("running.moot");
    ensure(out.exit_code == 0, || first_error(&out))?;
    let c = out.c_code.as_ref().unwrap();
    let printed = build_and_run(c, dir, "running")?;
    let want = "1; 2; 3; 4; 5; \n11; 12; 13; 14; 15; \n15; 13; 11; \n";
    ensure(printed == want, || format!("program printed {printed:?}"))?;
    let listing = [
        "void FIRST_DirIval_int( DirIval c, int &e ) {\n  if (c.delta > 0) e = c.min; else e = c.max;\n}",
        "bool DONE_DirIval_int( DirIval c, int e ) {\n  return (c.delta > 0 ? e > c.max : e < c.min);\n}",
        "void NEXT_DirIval_int( DirIval c, int &e ) { \n  e += c.delta; \n}",
        "int DATA_DirIval_int( DirIval c, int e ) { \n  return e; \n}",
    ];
    for block in listing {
        ensure(c.contains(block), || format!("listing block missing: {block}"))?;
    }
    let tree = out.tree.as_ref().unwrap();
    let names: Vec<&str> = tree.post_order.iter().map(|&i| tree.instances[i].mangled.as_str()).collect();
    for n in ["print_DirIval", "print_DirIval_charp", "print_Ival", "print_int_charp", "print_int", "print_charp"] {
        ensure(names.contains(&n), || format!("no {n}"))?;
    }
    Ok(format!("g++ build prints the three lines; {} functions emitted", names.len()))
}

fn criterion_4() -> Verdict {
    let sorted = first_error(&driver("sorted_missing_lte.moot"));
    let want = "SortedArrayListData does not subsume Ival\nmissing: LTE( (Ival), ... );";
    ensure(sorted == want, || format!("parameter bound: {sorted:?}"))?;
    let iter = first_error(&driver("check_iterator.moot"));
    let want = "Iterator does not subsume Ival\nmissing: FIRST( ..., (Ival) );";
    ensure(iter == want, || format!("check directive: {iter:?}"))?;
    let trace = first_error(&driver("broken_data.moot"));
    let head = "type error after call sequence:\n1: int main(int, char**)\n2: void print( DirIval, char* )\n\
                3: void print( DirIval )\n4: int DATA( DirIval, int )\n";
    ensure(trace.starts_with(head), || format!("call sequence: {trace:?}"))?;
    Ok("parameter bound, check directive and call sequence blocks match".into())
}

fn criterion_5(dir: &Path) -> Verdict {
    for name in ["intersect_12.moot", "intersect_123.moot"] {
        let out = driver(name);
        let msg = first_error(&out);
        ensure(out.exit_code == 1 && msg.contains("no consistent type for sig intersect"), || {
            format!("{name}: {msg}")
        })?;
    }
    let out = driver("intersect_1234.moot");
    ensure(out.exit_code == 0, || first_error(&out))?;
    let (tree, pt) = (out.tree.as_ref().unwrap(), out.types.as_ref().unwrap());
    let inst = tree.instances.iter().find(|i| i.name == "intersect").unwrap();
    let sig = pt.universe.display(pt.sigs[inst.sig].ty);
    ensure(sig == "DirIval(*)(DirIval+, DirIval+)", || format!("resolved to {sig}"))?;

    let out = driver("weaken_cast.moot");
    ensure(out.exit_code == 0, || first_error(&out))?;
    let (tree, pt) = (out.tree.as_ref().unwrap(), out.types.as_ref().unwrap());
    let callee = &tree.instances[tree.instances[tree.root].callees[0]];
    let sig = pt.universe.display(pt.sigs[callee.sig].ty);
    ensure(sig == "void(*)(Iterable+)", || format!("weakened call resolved to {sig}"))?;
    let printed = build_and_run(out.c_code.as_ref().unwrap(), dir, "weaken")?;
    ensure(printed == "1; 2; 3; \n", || format!("printed {printed:?}"))?;
    Ok("(1)+(2) and (1)+(2)+(3) inconsistent, +(4) picks sig 4, weakening prints 1; 2; 3;".into())
}

fn criterion_6() -> Verdict {
    for seed in 0..SIMULATION_CASES {
        let mut rng = StdRng::seed_from_u64(seed);
        let n = rng.gen_range(1..=8);
        let rels = random_relations(&mut rng, n);
        let relations: Vec<TypeRelation> = rels
            .iter()
            .enumerate()
            .map(|(i, pairs)| {
                TypeRelation::from_pairs(
                    RelationLabel::FieldSelect(format!("f{i}")),
                    pairs.iter().map(|&(a, b, _)| (t(a), t(b))),
                    pairs.iter().filter(|p| p.2).map(|&(a, b, _)| (t(a), t(b))),
                )
            })
            .collect();
        let refs: Vec<&TypeRelation> = relations.iter().collect();
        let got = greatest_fixed_point_of(&refs, &CandidateSubsumption::full(n));
        let want = naive_gfp(n, &rels);
        for a in 0..n {
            for b in 0..n {
                ensure(got.contains(t(a), t(b)) == want[a][b], || format!("seed {seed}: pair ({a}, {b})"))?;
            }
        }
    }
    Ok(format!("{SIMULATION_CASES} universes, 0 mismatches"))
}

fn criterion_7() -> Verdict {
    for seed in 0..FLOW_CASES {
        let mut rng = StdRng::seed_from_u64(seed);
        let n = rng.gen_range(1..=10);
        let density = rng.gen_range(0.1..0.5);
        let p = random_poset(&mut rng, n, density);
        let density = rng.gen_range(0.02..0.2);
        let m = random_cross_closed(&mut rng, &p, density);
        let a = random_antichain(&mut rng, &p);
        let b = random_antichain(&mut rng, &p);
        let ids = |x: &Antichain| x.members().iter().map(|t| t.index()).collect::<Vec<_>>();
        let want = powerset_flow(&p, &m, &a, &b);
        let (nl, nr) = flow_naive(&m, &a, &b, &p);
        let (sl, sr) = flow_symbolic(&FlowMemo::new(), LabelId(0), &m, &a, &b, &p);
        ensure((ids(&nl), ids(&nr)) == want, || format!("seed {seed}: naive"))?;
        ensure((ids(&sl), ids(&sr)) == want, || format!("seed {seed}: symbolic"))?;
    }
    Ok(format!("{FLOW_CASES} instances, 0 mismatches"))
}

fn criterion_8() -> Verdict {
    for seed in 0..LAW_CASES {
        let (mut rng, p) = common::setup(seed);
        let a = random_antichain(&mut rng, &p);
        let b = random_antichain(&mut rng, &p);
        let closure = |x: &Antichain| x.downward_closure(&p);
        let again = Antichain::restrict_maximal(&p, a.members().iter().copied());
        ensure(again == a, || format!("seed {seed}: idempotence"))?;
        let sub = closure(&a).iter().all(|t| closure(&b).contains(t));
        ensure(a.leq(&b, &p) == sub, || format!("seed {seed}: order"))?;
        let mut union = closure(&a);
        union.extend(closure(&b));
        union.sort();
        union.dedup();
        ensure(closure(&a.join(&b, &p)) == union, || format!("seed {seed}: join"))?;
        let density = rng.gen_range(0.02..0.3);
        let m = random_cross_closed(&mut rng, &p, density);
        let memo = FlowMemo::new();
        let (fa, fb) = flow_symbolic(&memo, LabelId(0), &m, &a, &b, &p);
        let a2 = a.join(&random_antichain(&mut rng, &p), &p);
        let b2 = b.join(&random_antichain(&mut rng, &p), &p);
        let (ga, gb) = flow_symbolic(&memo, LabelId(0), &m, &a2, &b2, &p);
        ensure(fa.leq(&a, &p) && fb.leq(&b, &p), || format!("seed {seed}: contractive"))?;
        ensure(fa.leq(&ga, &p) && fb.leq(&gb, &p), || format!("seed {seed}: monotone"))?;
    }
    for seed in 0..CONFLUENCE_GRAPHS {
        let inst = random_instance(seed);
        let memo = FlowMemo::new();
        let fifo = run_typing(&inst.graph, &inst.table, &inst.p, &memo, inst.initial.clone(), RunOptions::default());
        let mut rng = StdRng::seed_from_u64(seed.wrapping_mul(31));
        for _ in 0..SCHEDULES_PER_GRAPH {
            let mut pick = |len: usize| rng.gen_range(0..len);
            let opts = RunOptions {
                schedule: Schedule::Custom(&mut pick),
                trace: None,
            };
            let other = run_typing(&inst.graph, &inst.table, &inst.p, &memo, inst.initial.clone(), opts);
            ensure(other.typing == fifo.typing, || format!("graph {seed}: schedules disagree"))?;
        }
        if let Classification::Valid(delta) = classify_typing(&fifo.typing) {
            for (_, e) in inst.graph.edges() {
                ensure(inst.table.get(e.label).contains(delta[e.from.index()], delta[e.to.index()]), || {
                    format!("graph {seed}: unsound edge")
                })?;
            }
        }
    }
    let (p, table, g, typing) = perf_setup();
    let start = Instant::now();
    let memo = FlowMemo::new();
    let fast = run_typing(&g, &table, &p, &memo, typing.clone(), RunOptions::default());
    let plain = FlowMemo::unmemoized();
    let slow = run_typing(&g, &table, &p, &plain, typing, RunOptions::default());
    let elapsed = start.elapsed().as_secs_f64();
    ensure(fast.typing == slow.typing, || "memoized and plain runs disagree".into())?;
    let (m, u) = (memo.stats().singleton_evals, plain.stats().singleton_evals);
    let ratio = u as f64 / m.max(1) as f64;
    ensure(ratio >= MIN_MEMO_RATIO, || format!("ratio {ratio:.1}"))?;
    ensure(elapsed < PERF_BUDGET_SECS, || format!("took {elapsed:.2}s"))?;
    Ok(format!(
        "laws on {LAW_CASES} cases, {CONFLUENCE_GRAPHS} graphs x {SCHEDULES_PER_GRAPH} schedules; \
         200 types/5000 edges: {u} vs {m} singleton evals ({ratio:.1}x >= {MIN_MEMO_RATIO}x), {elapsed:.2}s < {PERF_BUDGET_SECS}s"
    ))
}

#[test]
fn acceptance_criteria() {
    let dir = tempfile::tempdir().unwrap();
    let results: Vec<Verdict> = vec![
        criterion_1(),
        criterion_2(),
        criterion_3(dir.path()),
        criterion_4(),
        criterion_5(dir.path()),
        criterion_6(),
        criterion_7(),
        criterion_8(),
    ];
    // Written past the harness capture so the lines show in plain runs.
    let mut out = std::io::stdout().lock();
    writeln!(out).unwrap();
    for (i, r) in results.iter().enumerate() {
        let line = match r {
            Ok(detail) => format!("criterion {}: PASS {detail}", i + 1),
            Err(why) => format!("criterion {}: FAIL {why}", i + 1),
        };
        writeln!(out, "{line}").unwrap();
    }
    drop(out);
    assert!(results.iter().all(Result::is_ok));
}
