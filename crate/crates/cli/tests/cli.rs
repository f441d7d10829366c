use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use lgc_core::{entails, entails_groebner, parse_statements, zeros, PolySet};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tempfile::TempDir;

const MIXED: &str = "# some but not all of x1..x3\nx1 OR x2 OR x3\nNOT (x1 AND x2 AND x3)\n";

fn lgc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lgc")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn load(p: &Path, m: usize) -> PolySet {
    parse_statements(&fs::read_to_string(p).unwrap(), Some(m)).unwrap()
}

#[test]
fn mixed_facts_encode_decode_prove() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "s.logic", MIXED);
    let tx = dir.path().join("tx.bin");
    let out = lgc(&["encode", "--scenario", "t1", "--in", s(&input), "--out", s(&tx)]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("payload_bits=10\n"));

    let shat = dir.path().join("shat.logic");
    let out = lgc(&["decode", "--in", s(&tx), "--out", s(&shat)]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(zeros(&load(&shat, 3)).unwrap(), zeros(&load(&input, 3)).unwrap());

    for (k, q) in [(&shat, &input), (&input, &shat)] {
        let out = lgc(&["prove", "--knowledge", s(k), "--query", s(q)]);
        assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
        assert_eq!(stdout(&out), "entailed=true\n");
    }
}

#[test]
fn prove_examples() {
    let dir = TempDir::new().unwrap();
    let x1 = write(&dir, "x1.logic", "x1 = 0\n");
    let x1x2 = write(&dir, "x1x2.logic", "x1*x2 = 0\n");
    let empty = write(&dir, "empty.logic", "# nothing known\n");
    for engine in ["brute", "groebner", "both"] {
        let out = lgc(&["prove", "--knowledge", s(&x1), "--query", s(&x1x2), "--engine", engine]);
        assert_eq!(out.status.code(), Some(0));
        let out = lgc(&["prove", "--knowledge", s(&empty), "--query", s(&x1), "--engine", engine, "--vars", "2"]);
        assert_eq!(out.status.code(), Some(1));
        assert_eq!(stdout(&out), "entailed=false\n");
    }
}

#[test]
fn usage_errors_exit_2() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "s.logic", MIXED);
    let tx = dir.path().join("tx.bin");
    let out = lgc(&["encode", "--scenario", "t4", "--in", s(&input), "--out", s(&tx)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--query"));
    assert_eq!(lgc(&["encode", "--scenario", "t9", "--in", "a", "--out", "b"]).status.code(), Some(2));
    assert_eq!(lgc(&["simulate", "--scenario", "t4", "--ps", "0.25"]).status.code(), Some(2));
    assert_eq!(lgc(&["bounds", "--scenario", "t1", "--ps", "1.5"]).status.code(), Some(2));
    assert_eq!(lgc(&["sweep", "--grid", "0.1:0.2"]).status.code(), Some(2));
    assert_eq!(lgc(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn domain_errors_exit_1() {
    let dir = TempDir::new().unwrap();
    let r = write(&dir, "r.logic", "x1 = 0\n");
    let weak = write(&dir, "weak.logic", "x1*x2 = 0\n");
    let tx = dir.path().join("tx.bin");
    let out = lgc(&["encode", "--scenario", "t2", "--in", s(&weak), "--background", s(&r), "--out", s(&tx)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error: "));

    let bad = write(&dir, "bad.bin", "LGC0 this is not a transmission");
    let out = lgc(&["decode", "--in", s(&bad), "--out", s(&dir.path().join("o"))]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("malformed header"));

    let syntax = write(&dir, "syntax.logic", "x1 AND AND x2\n");
    let out = lgc(&["encode", "--scenario", "t1", "--in", s(&syntax), "--out", s(&tx)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!String::from_utf8_lossy(&out.stderr).contains("panicked"));
}

#[test]
fn background_scenarios_round_trip() {
    let dir = TempDir::new().unwrap();
    let sender = write(&dir, "s.logic", MIXED);
    let r = write(&dir, "r.logic", "x1 OR x2 OR x3\n");
    let q = write(&dir, "q.logic", "x1 OR x2 OR x3\n");
    let m = 3;
    let zs = zeros(&load(&sender, m)).unwrap();

    let t2 = dir.path().join("t2.bin");
    let t3 = dir.path().join("t3.bin");
    let t5 = dir.path().join("t5.bin");
    let args = ["--in", s(&sender), "--background", s(&r)];
    let o2 = lgc(&[&["encode", "--scenario", "t2", "--out", s(&t2)], &args[..]].concat());
    let o3 = lgc(&[&["encode", "--scenario", "t3", "--out", s(&t3)], &args[..]].concat());
    assert_eq!(o2.status.code(), Some(0));
    let bits = |o: &Output| stdout(o).lines().find(|l| l.starts_with("payload_bits=")).unwrap().to_owned();
    assert_eq!(bits(&o2), bits(&o3));
    let o5 = lgc(&[
        &["encode", "--scenario", "t5", "--query", s(&q), "--out", s(&t5), "--codec", "random"],
        &args[..],
    ]
    .concat());
    assert_eq!(o5.status.code(), Some(0), "{}", String::from_utf8_lossy(&o5.stderr));

    let out = dir.path().join("out.logic");
    assert_eq!(lgc(&["decode", "--in", s(&t2), "--background", s(&r), "--out", s(&out)]).status.code(), Some(0));
    assert_eq!(zeros(&load(&out, m)).unwrap(), zeros(&load(&sender, m)).unwrap());

    assert_eq!(lgc(&["decode", "--in", s(&t3), "--background", s(&r), "--out", s(&out)]).status.code(), Some(0));
    let delta = load(&out, m);
    assert_eq!(zeros(&delta.union(&load(&r, m))).unwrap(), zs);

    assert_eq!(lgc(&["decode", "--in", s(&t5), "--background", s(&r), "--out", s(&out)]).status.code(), Some(0));
    let z = zeros(&load(&out, m)).unwrap();
    assert!(zs.is_subset(&z) && z.is_subset(&zeros(&load(&q, m)).unwrap()));

    let missing = lgc(&["decode", "--in", s(&t2), "--out", s(&out)]);
    assert_eq!(missing.status.code(), Some(1));
}

#[test]
fn concatenated_transmissions() {
    let dir = TempDir::new().unwrap();
    let sender = write(&dir, "s.logic", MIXED);
    let q = write(&dir, "q.logic", "x1 OR x2 OR x3\n");
    let a = dir.path().join("a.bin");
    let b = dir.path().join("b.bin");
    lgc(&["encode", "--scenario", "t1", "--in", s(&sender), "--out", s(&a)]);
    lgc(&["encode", "--scenario", "t4", "--in", s(&sender), "--query", s(&q), "--law", "0.25,0.25", "--out", s(&b)]);
    let both = dir.path().join("both.bin");
    fs::write(&both, [fs::read(&a).unwrap(), fs::read(&b).unwrap()].concat()).unwrap();
    let out = dir.path().join("out.logic");
    let o = lgc(&["decode", "--in", s(&both), "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 2);
    assert_eq!(fs::read_to_string(&out).unwrap().matches("# transmission").count(), 2);
}

#[test]
fn bounds_simulate_sweep() {
    let o = lgc(&["bounds", "--scenario", "t4", "--ps", "0.25", "--pq", "0.75"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("\nlambda=0.500000\n"));

    let o = lgc(&["simulate", "--scenario", "t1", "--ps", "0.2", "--m", "12", "--trials", "200"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("below_lower=false") && text.contains("above_upper=false"), "{text}");
    assert_eq!(text, stdout(&lgc(&["simulate", "--scenario", "t1", "--ps", "0.2", "--m", "12", "--trials", "200"])));

    let o = lgc(&["sweep", "--grid", "0.02:0.02:0.4"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("p_a,p_b,h_p_a,h_p_b,linear_rate,lambda"));
    assert_eq!(lines.count(), 400);
}

#[test]
fn engines_agree_through_the_cli() {
    let dir = TempDir::new().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut random_file = |name: &str, m: usize| {
        let lines: Vec<String> = (0..rng.gen_range(0..3))
            .map(|_| {
                let terms: Vec<String> = (0..rng.gen_range(1..4))
                    .map(|_| {
                        let mask: u32 = rng.gen_range(0..1 << m);
                        let vars: Vec<String> = (0..m).filter(|i| mask >> i & 1 == 1).map(|i| format!("x{}", i + 1)).collect();
                        if vars.is_empty() { "1".to_owned() } else { vars.join("*") }
                    })
                    .collect();
                format!("{} = 0", terms.join(" + "))
            })
            .collect();
        write(&dir, name, &(lines.join("\n") + "\n"))
    };
    let mut cases = Vec::new();
    for i in 0..100 {
        let m = 1 + i % 6;
        cases.push((random_file(&format!("k{i}"), m), random_file(&format!("q{i}"), m), m));
    }
    for (k, q, m) in cases {
        let vars = m.to_string();
        let o = lgc(&["prove", "--knowledge", s(&k), "--query", s(&q), "--vars", &vars]);
        assert_ne!(o.status.code(), Some(2));
        let (ks, qs) = (load(&k, m), load(&q, m));
        let expected = entails(&ks, &qs).unwrap();
        assert_eq!(expected, entails_groebner(&ks, &qs).unwrap());
        assert_eq!(o.status.code(), Some(if expected { 0 } else { 1 }), "{}", stdout(&o));
    }
}
