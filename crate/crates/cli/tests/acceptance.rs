//! Acceptance suite: one PASS/FAIL line per criterion, each under its time budget.

use std::collections::BTreeMap;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use subshift_core::af_core::build_bratteli;
use subshift_core::clopen::{verify_conjugation, verify_tprime};
use subshift_core::ktheory::{k0_stabilization, k1_witness, naturality_check, phi_map, snf_report};
use subshift_core::labeled_space::LabeledSpace;
use subshift_core::language::{disagreeability_certificate, max_gap};
use subshift_core::measures::{
    empirical_frequencies, monomial_family, pf_frequencies, shift_invariance_check, trace_eval, trace_monomial,
    tracial_property_check, GeneratorSymbol, MeasureValue, Mode,
};
use subshift_core::seqgen::{fixed_point_window, keane_product, morse_window, periodic_window};
use subshift_core::{factors, LanguageTable, MorseSpec, SequenceSource, Substitution, Word};

type Check = Result<(), String>;
type Criterion = (&'static str, u64, fn() -> Check);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Check {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn e<T: std::fmt::Display>(x: T) -> String {
    x.to_string()
}

fn tm_lang(half: usize, depth: usize) -> Result<LanguageTable, String> {
    factors(&SequenceSource::thue_morse().window(half).map_err(e)?, depth).map_err(e)
}

fn fib_lang(depth: usize) -> Result<LanguageTable, String> {
    let sigma = Substitution::parse("0:01,1:0").map_err(e)?;
    factors(&fixed_point_window(&sigma, (b'0', b'0'), 2, 4096).map_err(e)?, depth).map_err(e)
}

fn periodic_lang(depth: usize) -> Result<LanguageTable, String> {
    factors(&periodic_window(&Word::from("01"), 1024).map_err(e)?, depth).map_err(e)
}

fn c1_morse_window() -> Check {
    let spec = MorseSpec::thue_morse();
    let w8 = morse_window(&spec, 8).map_err(e)?;
    ensure(w8.to_string() == "10010110.01101001", || format!("N=8 window {w8}"))?;
    let w12 = morse_window(&spec, 12).map_err(e)?;
    let printed = format!("{}.{}", String::from_utf8_lossy(&w12.left()[4..]), String::from_utf8_lossy(w12.right()));
    ensure(printed == "10010110.011010011001", || format!("printed symbols {printed}"))
}

fn c2_keane() -> Check {
    let p = keane_product(&Word::from("01"), &Word::from("011")).map_err(e)?;
    ensure(p == Word::from("011010"), || format!("01 x 011 = {p}"))
}

fn c3_language() -> Check {
    let window = SequenceSource::thue_morse().window(1 << 16).map_err(e)?;
    let lang = factors(&window, 13).map_err(e)?;
    let w2: Vec<String> = lang.words(2).iter().map(|w| w.to_string()).collect();
    ensure(w2 == ["00", "01", "10", "11"], || format!("W_2 = {w2:?}"))?;
    // Direct scan of the raw symbols, independent of the factor table.
    let raw = window.symbols();
    ensure(!raw.windows(3).any(|t| t == b"000" || t == b"111"), || "000 or 111 occurs in the window".into())?;
    ensure(!lang.contains(b"000") && !lang.contains(b"111"), || "000 or 111 in the table".into())?;
    for n in 1..=6 {
        for b in lang.words(n) {
            let overlap = b.power(2).concat(&b[..1]);
            ensure(!lang.contains(&overlap), || format!("overlap {overlap} is a factor"))?;
            ensure(!raw.windows(overlap.len()).any(|t| t == overlap.as_bytes()), || format!("overlap {overlap} scanned"))?;
        }
    }
    let gap = max_gap(&window, &Word::from("0")).map_err(e)?;
    ensure(gap.max_gap == 3, || format!("max_gap(0) = {}", gap.max_gap))
}

fn c4_disagree() -> Check {
    let r = disagreeability_certificate(&tm_lang(4096, 24)?, 8, 3).map_err(e)?;
    ensure(r.pass, || format!("TM witness {:?}", r.witness))?;
    ensure(r.per_word.iter().all(|p| p.max_power <= 2), || "TM power above 2".into())?;
    let p = disagreeability_certificate(&periodic_lang(24)?, 8, 3).map_err(e)?;
    ensure(!p.pass && p.witness == Some(Word::from("01")), || format!("periodic witness {:?}", p.witness))
}

fn axioms_pass(lang: &LanguageTable, max_level: usize) -> Result<bool, String> {
    let reports = LabeledSpace::new(lang).verify_axioms(max_level).map_err(e)?;
    Ok(reports.len() == 4 * max_level && reports.iter().all(|r| r.pass && r.checked > 0))
}

fn c5_axioms() -> Check {
    let tm = tm_lang(4096, 8)?;
    let fib = fib_lang(8)?;
    ensure(axioms_pass(&tm, 5)?, || "TM axioms".into())?;
    ensure(axioms_pass(&fib, 5)?, || "0:01,1:0 axioms".into())?;
    ensure(!axioms_pass(&tm.without_word(&Word::from("010")), 5)?, || "TM fault not detected".into())?;
    ensure(!axioms_pass(&fib.without_word(&Word::from("010")), 5)?, || "0:01,1:0 fault not detected".into())
}

fn c6_crossed_product() -> Check {
    let lang = tm_lang(4096, 10)?;
    let t = verify_tprime(&lang, 5).map_err(e)?;
    ensure(t.pass && t.checked > 0, || format!("tprime failures {:?}", t.failures))?;
    let c = verify_conjugation(&lang, 5).map_err(e)?;
    ensure(c.pass && c.checked > 0, || format!("conjugation failures {:?}", c.failures))
}

fn c7_trace() -> Check {
    let lang = tm_lang(4096, 12)?;
    let m = pf_frequencies(&Substitution::thue_morse(), 7).map_err(e)?;
    ensure(m.mode() == Mode::Exact, || "TM measure not exact".into())?;
    ensure(m.exact(b"0").map_err(e)?.to_string() == "1/2", || "m(0)".into())?;
    ensure(m.exact(b"00").map_err(e)?.to_string() == "1/6", || "m(00)".into())?;
    let unit = trace_eval(&GeneratorSymbol::new("", "", ""), &m).map_err(e)?;
    ensure(unit.as_exact().map(|v| v.to_string()) == Some("1".into()), || format!("tau(1) = {unit}"))?;
    let space = LabeledSpace::new(&lang);
    let zero = MeasureValue::zero(Mode::Exact);
    for x in monomial_family(&space, 3).map_err(e)?.iter().filter(|x| x.alpha != x.beta) {
        let v = trace_monomial(&space, x, &m).map_err(e)?;
        ensure(v == zero, || format!("tau({x}) = {v}"))?;
    }
    let t = tracial_property_check(&space, &m, 3, 0.0).map_err(e)?;
    ensure(t.pass && t.checked > 0, || format!("tracial witness {:?}", t.witness))?;
    let emp = empirical_frequencies(&SequenceSource::thue_morse().window(1 << 19).map_err(e)?, 6).map_err(e)?;
    ensure(emp.scan_length().unwrap_or(0) + 6 >= 1 << 20, || "scan shorter than 2^20".into())?;
    let m6 = pf_frequencies(&Substitution::thue_morse(), 6).map_err(e)?;
    for n in 1..=6 {
        for w in lang.words(n) {
            let d = (m6.value(&w).map_err(e)?.to_f64() - emp.value(&w).map_err(e)?.to_f64()).abs();
            ensure(d <= 1e-3, || format!("empirical deviation {d} at {w}"))?;
        }
    }
    Ok(())
}

fn c8_shift_invariance() -> Check {
    let lang = tm_lang(4096, 8)?;
    let m = pf_frequencies(&Substitution::thue_morse(), 7).map_err(e)?;
    let r = shift_invariance_check(&m, &lang, 6, 0.0).map_err(e)?;
    ensure(r.pass && r.checked > 0, || format!("shift witness {:?}", r.witness))
}

fn c9_k1() -> Check {
    for (name, lang) in [("TM", tm_lang(4096, 12)?), ("periodic", periodic_lang(12)?)] {
        for l in 1..=10 {
            let map = phi_map(&lang, l).map_err(e)?;
            ensure(k1_witness(&map).pass, || format!("{name} witness at {l}"))?;
            ensure(snf_report(&map).verify(&map.matrix.to_big()), || format!("{name} certificate at {l}"))?;
        }
        for l in 1..=8 {
            let r = naturality_check(&lang, l).map_err(e)?;
            ensure(r.pass, || format!("{name} naturality at {l}: {:?}", r.failure))?;
        }
    }
    Ok(())
}

fn c10_k0() -> Check {
    let r = k0_stabilization(&tm_lang(4096, 24)?, 4, 10).map_err(e)?;
    ensure(r.consistent, || "routes disagree".into())?;
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures/tm_k0_4_10.json");
    let stored: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(path).map_err(e)?).map_err(e)?;
    ensure(stored == serde_json::to_value(&r).map_err(e)?, || "report differs from fixture".into())
}

fn c11_bratteli() -> Check {
    let lang = tm_lang(4096, 12)?;
    let d = build_bratteli(&lang, 4).map_err(e)?;
    let p: Vec<usize> = (1..=4).map(|k| lang.complexity(2 * k)).collect::<Result<_, _>>().map_err(e)?;
    ensure(d.level_sizes() == p, || format!("sizes {:?} vs {p:?}", d.level_sizes()))?;
    d.check_structure().map_err(|(k, w)| format!("vertex {w} at level {k}"))?;
    let m = pf_frequencies(&Substitution::thue_morse(), 8).map_err(e)?;
    for k in 1..4 {
        let mut children: BTreeMap<Word, Vec<Word>> = BTreeMap::new();
        for (u, v) in d.edges(k) {
            children.entry(u).or_default().push(v);
        }
        for u in d.level(k) {
            let sum = m.total(children.get(u).into_iter().flatten()).map_err(e)?;
            // Children of u are the words aub.
            for v in children.get(u).into_iter().flatten() {
                ensure(v.len() == u.len() + 2 && v[1..v.len() - 1] == u[..], || format!("edge {u} -> {v}"))?;
            }
            ensure(m.value(u).map_err(e)? == sum, || format!("m({u}) != sum over children"))?;
        }
    }
    Ok(())
}

fn verify_all(dir: &Path, extra: &[&str]) -> Result<i32, String> {
    let o = Command::new(env!("CARGO_BIN_EXE_subshift"))
        .env_remove("SUBSHIFT_OUT_DIR")
        .arg("--out-dir")
        .arg(dir)
        .args(extra)
        .arg("verify-all")
        .output()
        .map_err(e)?;
    o.status.code().ok_or_else(|| "terminated by signal".into())
}

fn snapshot(dir: &Path) -> Result<BTreeMap<String, Vec<u8>>, String> {
    let mut out = BTreeMap::new();
    for entry in std::fs::read_dir(dir).map_err(e)? {
        let path = entry.map_err(e)?.path();
        out.insert(path.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&path).map_err(e)?);
    }
    Ok(out)
}

fn c12_determinism() -> Check {
    let tmp = tempfile::tempdir().map_err(e)?;
    for (name, extra, expected) in
        [("tm", &[][..], 0), ("periodic", &["--kind", "periodic", "--pattern", "01"][..], 1)]
    {
        let (a, b) = (tmp.path().join(format!("{name}-a")), tmp.path().join(format!("{name}-b")));
        let (ca, cb) = (verify_all(&a, extra)?, verify_all(&b, extra)?);
        ensure(ca == expected && cb == expected, || format!("{name} exit codes {ca}, {cb}"))?;
        let (sa, sb) = (snapshot(&a)?, snapshot(&b)?);
        ensure(!sa.is_empty() && sa == sb, || format!("{name} artifacts differ between runs"))?;
    }
    Ok(())
}

fn main() {
    let criteria: [Criterion; 12] = [
        ("Thue-Morse construction fidelity", 1, c1_morse_window),
        ("Keane product", 1, c2_keane),
        ("language facts", 30, c3_language),
        ("disagreeability", 30, c4_disagree),
        ("representation axioms", 60, c5_axioms),
        ("crossed-product identities", 30, c6_crossed_product),
        ("trace", 60, c7_trace),
        ("shift invariance", 10, c8_shift_invariance),
        ("K1 witness", 60, c9_k1),
        ("K0 truncation consistency", 120, c10_k0),
        ("Bratteli structure", 30, c11_bratteli),
        ("determinism", 120, c12_determinism),
    ];
    let mut failed = 0;
    for (i, (name, budget, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let elapsed = start.elapsed();
        let verdict = match result {
            Ok(()) if elapsed < Duration::from_secs(*budget) => Ok(()),
            Ok(()) => Err(format!("over budget of {budget} s")),
            Err(msg) => Err(msg),
        };
        match verdict {
            Ok(()) => println!("PASS criterion {:>2}: {name} ({:.3} s)", i + 1, elapsed.as_secs_f64()),
            Err(msg) => {
                failed += 1;
                println!("FAIL criterion {:>2}: {name} ({:.3} s): {msg}", i + 1, elapsed.as_secs_f64());
            }
        }
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
