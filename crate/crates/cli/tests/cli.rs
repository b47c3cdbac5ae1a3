use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../core/tests/fixtures")
        .join(name)
}

fn wikivec(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wikivec"))
        .current_dir(dir)
        .env_remove("WIKIVEC_WORKERS")
        .args(args)
        .output()
        .unwrap()
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = wikivec(dir, args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn usage_error(dir: &Path, args: &[&str]) -> Value {
    let out = wikivec(dir, args);
    assert_eq!(out.status.code(), Some(2), "{args:?}");
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "usage");
    err
}

fn json_file(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn vectors(path: &Path) -> Vec<(String, Vec<f32>)> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| {
            let mut f = l.split(' ');
            let token = f.next().unwrap().to_string();
            (token, f.map(|x| x.parse().unwrap()).collect())
        })
        .collect()
}

fn ingest_dump10(dir: &Path) -> PathBuf {
    let dump = fixture("dump10.xml");
    ok(
        dir,
        &[
            "ingest",
            "--dump",
            dump.to_str().unwrap(),
            "--out",
            "c.txt",
            "--ordered",
            "--anchor-stats",
            "senses.tsv",
        ],
    );
    dir.join("c.txt")
}

#[test]
fn ingest_twice_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let dump = fixture("dump12.xml");
    let dump = dump.to_str().unwrap();
    ok(
        dir.path(),
        &[
            "ingest",
            "--dump",
            dump,
            "--out",
            "a.txt",
            "--mode",
            "standard",
            "--ordered",
        ],
    );
    ok(
        dir.path(),
        &[
            "ingest",
            "--dump",
            dump,
            "--out",
            "b.txt",
            "--mode",
            "standard",
            "--ordered",
        ],
    );
    let a = fs::read(dir.path().join("a.txt")).unwrap();
    assert_eq!(a, fs::read(dir.path().join("b.txt")).unwrap());
    assert_eq!(a, fs::read(fixture("dump12.standard.txt")).unwrap());

    let m = json_file(&dir.path().join("a.txt.manifest.json"));
    assert_eq!(m["command"], "ingest");
    assert_eq!(m["config"]["mode"], "standard");
    assert_eq!(m["outputs"][0]["path"], "a.txt");
    assert!(m["outputs"][0]["digest"]
        .as_str()
        .unwrap()
        .starts_with("sha256:"));
    assert!(m["wall_time"].as_f64().unwrap() >= 0.0);
}

#[test]
fn ingest_reports_stats() {
    let dir = tempfile::tempdir().unwrap();
    let dump = fixture("dump10.xml");
    let stdout = ok(
        dir.path(),
        &[
            "ingest",
            "--dump",
            dump.to_str().unwrap(),
            "--out",
            "c.txt",
            "--stats",
            "s.json",
            "--workers",
            "3",
        ],
    );
    let stats: Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(stats["pages_kept"], 7);
    assert_eq!(json_file(&dir.path().join("s.json")), stats);
    assert_eq!(
        fs::read_to_string(dir.path().join("c.txt"))
            .unwrap()
            .lines()
            .count(),
        7
    );
}

#[test]
fn zero_epochs_keeps_pretrained_rows() {
    let dir = tempfile::tempdir().unwrap();
    ingest_dump10(dir.path());
    fs::write(
        dir.path().join("v.txt"),
        "4 4\nAmazon 0.5 -1.25 2 0.125\nseattle 1 2 3 4\nwiki_1 9 9 9 9\nabsent 7 7 7 7\n",
    )
    .unwrap();
    ok(
        dir.path(),
        &[
            "train",
            "--corpus",
            "c.txt",
            "--out",
            "out.vec",
            "--epochs",
            "0",
            "--init",
            "v.txt",
            "--dim",
            "4",
            "--min-count",
            "1",
        ],
    );
    let rows = vectors(&dir.path().join("out.vec"));
    let row = |t: &str| rows.iter().find(|(tok, _)| tok == t).unwrap().1.clone();
    assert_eq!(row("amazon"), [0.5, -1.25, 2.0, 0.125]);
    assert_eq!(row("seattle"), [1.0, 2.0, 3.0, 4.0]);
    assert_ne!(row("wiki_1"), [9.0; 4]);
    assert!(rows.iter().all(|(t, _)| t != "absent"));
}

#[test]
fn manifest_rerun_reproduces_digests() {
    let dir = tempfile::tempdir().unwrap();
    ingest_dump10(dir.path());
    let args = [
        "train",
        "--corpus",
        "c.txt",
        "--out",
        "v.vec",
        "--dim",
        "8",
        "--epochs",
        "3",
        "--min-count",
        "1",
        "--seed",
        "9",
    ];
    ok(dir.path(), &args);
    let first = json_file(&dir.path().join("v.vec.manifest.json"));
    fs::rename(
        dir.path().join("v.vec.manifest.json"),
        dir.path().join("first.json"),
    )
    .unwrap();
    ok(dir.path(), &["train", "--config", "first.json"]);
    let second = json_file(&dir.path().join("v.vec.manifest.json"));
    assert_eq!(first["outputs"], second["outputs"]);
    assert_eq!(first["config"], second["config"]);
    assert_eq!(first["config"]["workers"], 1);
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    ingest_dump10(dir.path());
    fs::write(
        dir.path().join("cfg.json"),
        r#"{"corpus": "c.txt", "out": "v.vec", "dim": 6, "epochs": 1, "min_count": 1}"#,
    )
    .unwrap();
    ok(dir.path(), &["train", "--config", "cfg.json", "--dim", "3"]);
    let m = json_file(&dir.path().join("v.vec.manifest.json"));
    assert_eq!(m["config"]["dim"], 3);
    assert_eq!(m["config"]["epochs"], 1);
    assert_eq!(vectors(&dir.path().join("v.vec"))[0].1.len(), 3);
}

#[test]
fn workers_default_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    ingest_dump10(dir.path());
    let out = Command::new(env!("CARGO_BIN_EXE_wikivec"))
        .current_dir(dir.path())
        .env("WIKIVEC_WORKERS", "2")
        .args([
            "train",
            "--corpus",
            "c.txt",
            "--out",
            "v.vec",
            "--dim",
            "4",
            "--epochs",
            "1",
            "--min-count",
            "1",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(
        json_file(&dir.path().join("v.vec.manifest.json"))["config"]["workers"],
        2
    );
}

/// Set `a` answers both shared questions; in `b` the queen row points
/// elsewhere, so `paris` wins. Only `a` knows berlin and germany, so the
/// capital question is found by `a` alone.
fn analogy_fixture(dir: &Path) {
    fs::write(
        dir.join("a.vec"),
        "8 3\nman 1 0 0\nwoman 1 1 0\nking 0 0 1\nqueen 0 1 1\nparis 3 0 1\nfrance 3 1 1\nberlin 5 0 1\ngermany 5 1 1\n",
    )
    .unwrap();
    fs::write(
        dir.join("b.vec"),
        "6 3\nman 1 0 0\nwoman 1 1 0\nking 0 0 1\nqueen 1 -1 0\nparis 0 1 1.1\nfrance 2 2 2\n",
    )
    .unwrap();
    fs::write(
        dir.join("q.txt"),
        ": family\nman woman king queen\nman king woman queen\n: capital\nparis france berlin germany\n",
    )
    .unwrap();
}

#[test]
fn commons_scores_the_shared_questions() {
    let dir = tempfile::tempdir().unwrap();
    analogy_fixture(dir.path());
    let stdout = ok(
        dir.path(),
        &[
            "eval",
            "analogy",
            "--vectors",
            "a.vec,b.vec",
            "--questions",
            "q.txt",
            "--buckets",
            "30000",
            "--commons",
            "--json",
        ],
    );
    let report: Value = serde_json::from_str(&stdout).unwrap();
    let sets = report["sets"].as_array().unwrap();
    assert_eq!(sets.len(), 2);
    assert_eq!(sets[0]["all"][0]["found"], 3);
    assert_eq!(sets[1]["all"][0]["found"], 2);
    for set in sets {
        assert_eq!(set["commons"][0]["found"], 2);
        assert_eq!(set["commons"][0]["total"], 3);
    }
    assert_eq!(sets[0]["commons"][0]["correct"], 2);
    assert_eq!(sets[1]["commons"][0]["correct"], 0);

    let table = ok(
        dir.path(),
        &[
            "eval",
            "analogy",
            "--vectors",
            "a.vec,b.vec",
            "--questions",
            "q.txt",
            "--buckets",
            "30000",
            "--commons",
        ],
    );
    assert!(table.contains("Accuracy (All)") && table.contains("Accuracy (Commons)"));
}

#[test]
fn usage_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    analogy_fixture(dir.path());
    let err = usage_error(
        dir.path(),
        &[
            "eval",
            "analogy",
            "--vectors",
            "a.vec",
            "--questions",
            "q.txt",
            "--commons",
        ],
    );
    assert!(err["error"]["message"]
        .as_str()
        .unwrap()
        .contains("--commons"));
    usage_error(
        dir.path(),
        &[
            "eval",
            "analogy",
            "--vectors",
            "a.vec",
            "--questions",
            "missing.txt",
        ],
    );
    usage_error(
        dir.path(),
        &[
            "similar",
            "--vectors",
            "a.vec",
            "--query",
            "man",
            "--no-such-flag",
        ],
    );
    usage_error(dir.path(), &["frobnicate"]);
    usage_error(
        dir.path(),
        &["train", "--corpus", "q.txt", "--out", "x.vec", "--dim", "0"],
    );
}

#[test]
fn runtime_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    analogy_fixture(dir.path());
    let out = wikivec(
        dir.path(),
        &["similar", "--vectors", "a.vec", "--query", "zebra"],
    );
    assert_eq!(out.status.code(), Some(1));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "runtime");
}

#[test]
fn queries() {
    let dir = tempfile::tempdir().unwrap();
    analogy_fixture(dir.path());
    assert_eq!(
        ok(
            dir.path(),
            &[
                "analogy",
                "--vectors",
                "a.vec",
                "--a",
                "man",
                "--b",
                "woman",
                "--c",
                "king"
            ]
        )
        .trim(),
        "queen"
    );
    let listing = ok(
        dir.path(),
        &[
            "similar",
            "--vectors",
            "a.vec",
            "--query",
            "King",
            "-k",
            "2",
            "--json",
        ],
    );
    let listing: Value = serde_json::from_str(&listing).unwrap();
    let neighbors = listing["neighbors"].as_array().unwrap();
    assert_eq!(neighbors.len(), 2);
    assert_eq!(neighbors[0]["token"], "queen");
}

#[test]
fn baseline_and_similarity() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ingest_dump10(d);
    let dump = fixture("dump10.xml");
    let summary = ok(
        d,
        &[
            "baseline",
            "build",
            "--dump",
            dump.to_str().unwrap(),
            "--out",
            "g.bin",
        ],
    );
    let summary: Value = serde_json::from_str(&summary).unwrap();
    assert_eq!(summary["page_count"], 7);
    assert_eq!(json_file(&d.join("g.bin.json")), summary);
    let m = json_file(&d.join("g.bin.manifest.json"));
    assert_eq!(m["outputs"].as_array().unwrap().len(), 2);

    let sim: f64 = ok(
        d,
        &[
            "baseline", "sim", "--graph", "g.bin", "--a", "1", "--b", "1",
        ],
    )
    .trim()
    .parse()
    .unwrap();
    assert!((0.0..=1.0).contains(&sim));
    let stats: Value =
        serde_json::from_str(&ok(d, &["stats", "--graph", "g.bin", "--corpus", "c.txt"])).unwrap();
    assert_eq!(stats["graph"], summary);
    assert_eq!(stats["corpus"]["lines"], 7);

    ok(
        d,
        &[
            "train",
            "--corpus",
            "c.txt",
            "--out",
            "v.vec",
            "--dim",
            "8",
            "--min-count",
            "1",
        ],
    );
    fs::create_dir(d.join("pairs")).unwrap();
    fs::write(
        d.join("pairs/toy.tsv"),
        "word1\tword2\tscore\namazon\tseattle\t6\namazon\tbrazil\t7.5\nseattle\tbrazil\t2\nrain forest\tbrazil\t8\nzebra\tamazon\t1\n",
    )
    .unwrap();
    let stdout = ok(
        d,
        &[
            "eval",
            "similarity",
            "--vectors",
            "v.vec",
            "--graph",
            "g.bin",
            "--pairs",
            "pairs",
            "--sense-index",
            "senses.tsv",
            "--common-subset",
            "--json",
            "--out",
            "sim.json",
        ],
    );
    let report: Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(report, json_file(&d.join("sim.json")));
    let scorers = report["scorers"].as_array().unwrap();
    assert_eq!(scorers[1]["name"], "links");
    for s in scorers {
        assert_eq!(s["reports"][0]["pairs_total"], 5);
    }
    assert_eq!(
        report["common_subset"]["scorers"].as_array().unwrap().len(),
        2
    );
    let m = json_file(&d.join("sim.json.manifest.json"));
    let inputs: Vec<&str> = m["inputs"]
        .as_array()
        .unwrap()
        .iter()
        .map(|i| i["path"].as_str().unwrap())
        .collect();
    assert!(inputs.contains(&"pairs/toy.tsv"));
}
