use std::path::{Path, PathBuf};

use abduction::gen::GenFragment;
use abduction_cli::{run, EXIT_BUDGET, EXIT_OK, EXIT_USAGE, EXIT_WRONG_FRAGMENT};
use serde_json::Value;

fn fixture(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name).display().to_string()
}

fn scratch(name: &str, text: &str) -> String {
    let path = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    std::fs::write(&path, text).unwrap();
    path.display().to_string()
}

fn call(args: &[&str]) -> (i32, String, String) {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run(std::iter::once("abduce").chain(args.iter().copied()), &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn json(args: &[&str]) -> Value {
    let mut args = args.to_vec();
    args.push("--json");
    let (code, out, err) = call(&args);
    assert_eq!(code, EXIT_OK, "{err}");
    serde_json::from_str(&out).unwrap()
}

fn names(v: &Value) -> Vec<&str> {
    v.as_array().unwrap().iter().map(|s| s.as_str().unwrap()).collect()
}

#[test]
fn sailing_sets() {
    let v = json(&["sets", &fixture("sailing.abd")]);
    let a = &v["answer"];
    assert_eq!(names(&a["facets"]), ["c", "s"]);
    assert_eq!(names(&a["necessary"]), ["w"]);
    assert_eq!(names(&a["relevant"]), ["w", "c", "s"]);
    assert_eq!(a["minimal"].as_array().unwrap().len(), 2);
    assert_eq!(v["engine"], "ORACLE");
}

#[test]
fn sailing_facet_routes_to_oracle() {
    let v = json(&["facet", &fixture("sailing.abd"), "--var", "w"]);
    assert_eq!(v["answer"], false);
    assert_eq!(v["engine"], "ORACLE");
    let v = json(&["facet", &fixture("sailing.abd"), "--var", "c"]);
    assert_eq!(v["answer"], true);
}

#[test]
fn sailing_diverse_witness() {
    let v = json(&["diverse", &fixture("sailing.abd"), "-k", "3", "--witness"]);
    assert_eq!(v["answer"], true);
    assert_eq!(v["witness"]["d"], 3);
    let e1 = names(&v["witness"]["e1"]).len();
    let e2 = names(&v["witness"]["e2"]).len();
    assert!(e1 >= 2 && e2 >= 2);
    let v = json(&["diverse", &fixture("sailing.abd"), "-k", "4"]);
    assert_eq!(v["answer"], false);
    assert!(v.get("witness").is_none());
}

#[test]
fn json_key_order() {
    let (_, out, _) = call(&["facet", &fixture("sailing.abd"), "--var", "c", "--json"]);
    let keys = ["\"command\"", "\"answer\"", "\"engine\"", "\"verdicts\"", "\"timing_ms\""];
    let positions: Vec<usize> = keys.iter().map(|k| out.find(k).unwrap()).collect();
    assert!(positions.windows(2).all(|w| w[0] < w[1]), "{out}");
    let (_, out, _) = call(&["diverse", &fixture("sailing.abd"), "-k", "1", "--witness", "--json"]);
    assert!(out.find("\"timing_ms\"").unwrap() < out.find("\"witness\"").unwrap());
}

#[test]
fn exit_codes() {
    let sailing = fixture("sailing.abd");
    assert_eq!(call(&["facet", &sailing, "--var", "w", "--engine", "poly"]).0, EXIT_WRONG_FRAGMENT);
    assert_eq!(call(&["sets", &sailing, "--budget", "8"]).0, EXIT_BUDGET);
    assert_eq!(call(&["facet", &sailing, "--var", "zz"]).0, EXIT_USAGE);
    assert_eq!(call(&["facet", &sailing]).0, EXIT_USAGE);
    assert_eq!(call(&["sets", "/nonexistent/file.abd"]).0, EXIT_USAGE);
    assert_eq!(call(&["frobnicate"]).0, EXIT_USAGE);
    let bad = scratch("bad.abd", "clause a\nhyp a\nman a b\n");
    assert_eq!(call(&["sets", &bad]).0, EXIT_USAGE);
    assert_eq!(call(&["--help"]).0, EXIT_OK);
}

#[test]
fn poly_engine_names() {
    let text = "clause -x m\nclause -y m\nhyp x y\nman m\n";
    let file = scratch("imp.abd", text);
    let v = json(&["facet", &file, "--var", "x", "--engine", "poly"]);
    assert_eq!(v["engine"], "POLY(IMP)");
    assert_eq!(v["answer"], true);
    let file = scratch("eq.abd", "eq x m\neq y m\nhyp x y\nman m\n");
    assert_eq!(json(&["relevant", &file, "--var", "x"])["engine"], "POLY(AFFINE2)");
    assert_eq!(json(&["diverse", &file, "-k", "2"])["engine"], "POLY(AFFINE2)");
}

#[test]
fn classify_problem() {
    let v = json(&["classify", &fixture("sailing.abd"), "--problem", "isfacet"]);
    assert_eq!(v["answer"], "NP_COMPLETE");
    assert_eq!(v["verdicts"].as_array().unwrap().len(), 1);
    let v = json(&["classify", &fixture("sailing.abd")]);
    assert_eq!(v["verdicts"].as_array().unwrap().len(), 4);
}

#[test]
fn reduce_rules() {
    let sailing = fixture("sailing.abd");
    let v = json(&["reduce", &sailing, "--rule", "abd2facet"]);
    let target = scratch("abd2facet.abd", v["answer"].as_str().unwrap());
    assert_eq!(json(&["facet", &target])["answer"], true);

    let v = json(&["reduce", &sailing, "--rule", "abd2div"]);
    let target = scratch("abd2div.abd", v["answer"].as_str().unwrap());
    assert_eq!(json(&["diverse", &target])["answer"], true);

    let v = json(&["reduce", &fixture("wide.abd"), "--rule", "efpp", "--defs", &fixture("split4.defs")]);
    let text = v["answer"].as_str().unwrap();
    assert!(!text.contains("app"));
    let target = scratch("efpp.abd", text);
    assert_eq!(json(&["sets", &target])["answer"], json(&["sets", &fixture("wide.abd")])["answer"]);

    assert_eq!(call(&["reduce", &fixture("wide.abd"), "--rule", "efpp"]).0, EXIT_USAGE);
    assert_eq!(call(&["reduce", &sailing, "--rule", "negunit"]).0, EXIT_USAGE);
    assert_eq!(call(&["reduce", &sailing, "--rule", "elimpos"]).0, EXIT_USAGE);

    let pos = scratch("pos.abd", "clause a b\nclause b c\nhyp a\nman b\n");
    let v = json(&["reduce", &pos, "--rule", "pos2div", "-k", "2"]);
    assert!(v["answer"].as_str().unwrap().contains("k 2"));
}

#[test]
fn gen_is_deterministic_and_parses() {
    let a = json(&["gen", "--fragment", "imp", "--vars", "6", "--atoms", "8", "--seed", "1"]);
    let b = json(&["gen", "--fragment", "imp", "--vars", "6", "--atoms", "8", "--seed", "1"]);
    assert_eq!(a["answer"], b["answer"]);
    let file = scratch("gen.abd", a["answer"].as_str().unwrap());
    assert_eq!(json(&["check", &file])["answer"]["agree"], true);
    assert_eq!(call(&["gen", "--fragment", "cnf", "--vars", "6", "--atoms", "8", "--seed", "1"]).0, EXIT_USAGE);
}

#[test]
fn auto_routing_agrees_with_oracle() {
    for fragment in GenFragment::ALL {
        for seed in 0..12u64 {
            let text = abduction::gen::generate(fragment, 6, 7, seed);
            let file = scratch(&format!("route-{fragment}-{seed}.abd"), &text);
            let inst = abduction::parse_instance(&text).unwrap().into_base();
            for h in inst.names(&inst.hypotheses) {
                for command in ["facet", "relevant"] {
                    let auto = json(&[command, &file, "--var", &h]);
                    let oracle = json(&[command, &file, "--var", &h, "--engine", "oracle"]);
                    assert_eq!(auto["answer"], oracle["answer"], "{command} {h} in\n{text}");
                }
            }
            for k in 0..=inst.hypotheses.len() {
                let k = k.to_string();
                let auto = json(&["diverse", &file, "-k", &k]);
                let oracle = json(&["diverse", &file, "-k", &k, "--engine", "oracle"]);
                assert_eq!(auto["answer"], oracle["answer"], "k {k} in\n{text}");
            }
            let check = json(&["check", &file]);
            assert_eq!(check["answer"]["agree"], true, "{check}");
        }
    }
}
