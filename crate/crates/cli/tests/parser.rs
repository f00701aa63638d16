//! Parser properties over the fixture corpus and fuzzed input.

use std::path::{Path, PathBuf};

use proptest::prelude::*;
use qsc_cli::text::{parse, parse_bytes, parse_syntax, serialize};
use qsc_core::qcore::RngPolicy;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn fixture_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

fn fixtures() -> Vec<(PathBuf, String)> {
    let mut out: Vec<(PathBuf, String)> = std::fs::read_dir(fixture_dir())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "qsc"))
        .map(|p| {
            let text = std::fs::read_to_string(&p).unwrap();
            (p, text)
        })
        .collect();
    out.sort();
    out
}

#[test]
fn corpus_is_large_enough() {
    assert!(fixtures().len() >= 15);
}

#[test]
fn serialization_fixpoint() {
    let base = fixture_dir();
    for (path, text) in fixtures() {
        let first = parse(&text, &base).unwrap_or_else(|d| panic!("{}: {d}", path.display()));
        let canon = serialize(&first.ir);
        let second = parse(&canon, &base).unwrap();
        assert_eq!(first.ir, second.ir, "{}", path.display());
        assert_eq!(serialize(&second.ir), canon);
    }
}

fn check_total(bytes: &[u8], base: &Path) {
    match parse_bytes(bytes, base) {
        Ok(p) => {
            let _ = qsc_core::execute(&p.ir, &RngPolicy::Seeded(0));
        }
        Err(d) => {
            assert!(d.line >= 1 && d.column >= 1, "{d:?}");
            assert!(d.code.len() == 4 && d.code.starts_with('E'), "{d:?}");
        }
    }
}

const VOCAB: &[&str] = &[
    "transistor", "qubit", "ebit", "loop", "input", "gate", "signal", "refresh", "readout", "budget", "t", "u",
    "q", "t.in", "t.out", "u.in", "u.out[0]", "t.in[1]", "->", "kind=wire", "kind=schain", "kind=choi:h",
    "kind=choi:cz", "kind=magict", "kind=choi:zz", "length=3", "length=0", "state=0", "state=+-", "state=file:",
    "mode=measure", "mode=teleport", "targets=q", "targets=t.out,q", "cycle=1", "cycle=2", "cycle=0", "a=t.out",
    "b=u.in", "a=q", "basis=Z", "basis=X", "backward", "dagger", "h", "cnot", "=", "#", "7", "format=1",
];

/// Ten thousand inputs: raw bytes, byte-mutated fixtures and token soup.
#[test]
fn fuzzed_inputs_get_diagnostics() {
    let base = fixture_dir();
    let corpus = fixtures();
    let mut rng = ChaCha8Rng::seed_from_u64(0xF022);
    for i in 0..10_000 {
        let bytes: Vec<u8> = match i % 3 {
            0 => {
                let len = rng.gen_range(0..200);
                let mut v: Vec<u8> = (0..len).map(|_| rng.gen()).collect();
                if rng.gen_bool(0.5) {
                    v.splice(0..0, b"format=1\n".iter().copied());
                }
                v
            }
            1 => {
                let mut v = corpus[rng.gen_range(0..corpus.len())].1.clone().into_bytes();
                for _ in 0..rng.gen_range(1..6) {
                    let at = rng.gen_range(0..=v.len());
                    match rng.gen_range(0..3) {
                        0 if at < v.len() => v[at] = rng.gen_range(0x20..0x7f),
                        1 if at < v.len() => {
                            v.remove(at);
                        }
                        _ => {
                            let pool = b"=.[]#\n 019xz->";
                            v.insert(at, pool[rng.gen_range(0..pool.len())])
                        }
                    }
                }
                v
            }
            _ => {
                let mut s = String::from("format=1\n");
                for _ in 0..rng.gen_range(0..10) {
                    for _ in 0..rng.gen_range(1..6) {
                        s.push_str(VOCAB[rng.gen_range(0..VOCAB.len())]);
                        s.push(' ');
                    }
                    s.push('\n');
                }
                s.into_bytes()
            }
        };
        check_total(&bytes, &base);
    }
}

fn line() -> impl Strategy<Value = String> {
    let id = prop::sample::select(vec!["a", "b", "q", "r"]);
    let sym = "[01+-]{1,2}";
    let cyc = 1u32..4;
    prop_oneof![
        (id.clone(), prop::sample::select(vec!["wire length=2", "schain", "choi:h", "choi:cz", "magict"]), any::<bool>())
            .prop_map(|(i, k, b)| format!("transistor {i} kind={k}{}", if b { " backward" } else { "" })),
        (id.clone(), sym).prop_map(|(i, s)| format!("qubit {i} state={s}")),
        (id.clone(), sym, prop::sample::select(vec!["measure", "teleport"]))
            .prop_map(|(i, s, m)| format!("input {i}.in state={s} mode={m}")),
        (id.clone(), id.clone(), 0usize..2).prop_map(|(a, b, l)| format!("ebit e{a}{b}{l} a={a}.out b={b}.in[{l}]")),
        id.clone().prop_map(|i| format!("loop {i}.out -> {i}.in")),
        (id.clone(), cyc.clone()).prop_map(|(i, c)| format!("gate h targets={i} cycle={c}")),
        (id.clone(), cyc.clone()).prop_map(|(i, c)| format!("signal {i} cycle={c}")),
        (id.clone(), cyc.clone()).prop_map(|(i, c)| format!("refresh {i} cycle={c}")),
        (id, cyc).prop_map(|(i, c)| format!("readout {i}.out basis=X cycle={c}")),
    ]
}

proptest! {
    /// Any syntactically valid program survives serialize then parse.
    #[test]
    fn syntax_round_trip(lines in prop::collection::vec(line(), 0..12), budget in prop::option::of(1usize..30)) {
        let mut text = String::from("format=1\n");
        if let Some(b) = budget {
            text.push_str(&format!("budget {b}\n"));
        }
        for l in &lines {
            text.push_str(l);
            text.push('\n');
        }
        let here = Path::new(".");
        let p = parse_syntax(&text, here).unwrap();
        let q = parse_syntax(&serialize(&p.ir), here).unwrap();
        prop_assert_eq!(&p.ir, &q.ir);
        prop_assert_eq!(parse(&text, here).is_ok(), parse(&serialize(&p.ir), here).is_ok());
    }
}
