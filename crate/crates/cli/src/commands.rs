use std::cell::OnceCell;
use std::fmt::Write as _;

use serde_json::{json, Value};
use subshift_core::af_core::{build_bratteli, dimension_data, export_dot, BratteliDiagram};
use subshift_core::clopen::{t_generator, verify_conjugation, verify_partition_axiom, verify_tprime};
use subshift_core::ktheory::{k0_stabilization, k1_witness, naturality_check, phi_map, snf_report};
use subshift_core::labeled_space::LabeledSpace;
use subshift_core::language::disagreeability_certificate;
use subshift_core::measures::{
    empirical_frequencies, measure_for_source, shift_invariance_check, trace_eval, tracial_property_check,
    FrequencyMeasure, GeneratorSymbol, MeasureValue, Mode, MIN_EMPIRICAL_WINDOW,
};
use subshift_core::{factors, Error, LanguageTable, SequenceSource, Window, Word};

use crate::artifacts::Artifacts;
use crate::config::RunConfig;
use crate::{classify, CliError, Outcome};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::Subcommand)]
pub enum Command {
    /// Two-sided window of the configured point.
    Gen,
    /// Factor table and complexity.
    Lang,
    /// Recurrence gaps of every short word.
    Recurrence,
    /// Repetition powers and the disagreeability certificate.
    Disagree,
    /// Representation axioms and the cylinder identities of the shift.
    Axioms,
    /// Strong cofinality certificate.
    Cofinal,
    /// Bratteli diagram of the AF core.
    Bratteli,
    /// The map 1 - Φ: kernel witness, naturality, Smith data.
    Phi,
    /// Cokernel truncation data across levels.
    K,
    /// Invariant measure on cylinders.
    Freq,
    /// Trace on generator symbols and the tracial property.
    Trace,
    /// Every check above; fails if any of them fails.
    VerifyAll,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Gen => "gen",
            Command::Lang => "lang",
            Command::Recurrence => "recurrence",
            Command::Disagree => "disagree",
            Command::Axioms => "axioms",
            Command::Cofinal => "cofinal",
            Command::Bratteli => "bratteli",
            Command::Phi => "phi",
            Command::K => "k",
            Command::Freq => "freq",
            Command::Trace => "trace",
            Command::VerifyAll => "verify-all",
        }
    }

    pub const CHECKS: [Command; 11] = [
        Command::Gen,
        Command::Lang,
        Command::Recurrence,
        Command::Disagree,
        Command::Axioms,
        Command::Cofinal,
        Command::Bratteli,
        Command::Phi,
        Command::K,
        Command::Freq,
        Command::Trace,
    ];
}

struct Ctx<'a> {
    cfg: &'a RunConfig,
    art: Artifacts,
    source: SequenceSource,
    window: Window,
    lang: LanguageTable,
    measure: OnceCell<FrequencyMeasure>,
}

fn usage(e: Error) -> CliError {
    CliError::Usage(e.to_string())
}

impl<'a> Ctx<'a> {
    fn new(cfg: &'a RunConfig) -> Result<Self, CliError> {
        cfg.validate()?;
        let source = cfg.source()?;
        let window = source.window(cfg.window).map_err(usage)?;
        let lang = factors(&window, cfg.depth).map_err(usage)?;
        Ok(Self { cfg, art: Artifacts::new(cfg), source, window, lang, measure: OnceCell::new() })
    }

    fn measure_depth(&self) -> usize {
        let lv = &self.cfg.levels;
        lv.measure.max(2 * lv.bratteli).max(2 * lv.trace + 1).max(lv.shift + 1)
    }

    fn measure(&self) -> Result<&FrequencyMeasure, CliError> {
        if let Some(m) = self.measure.get() {
            return Ok(m);
        }
        let m = measure_for_source(&self.source, self.measure_depth(), self.cfg.scan).map_err(usage)?;
        Ok(self.measure.get_or_init(|| m))
    }

    /// Tolerance for comparisons that involve empirical values.
    fn tol(&self, m: &FrequencyMeasure) -> f64 {
        match m.mode() {
            Mode::Exact | Mode::Certified => 0.0,
            Mode::Empirical => self.cfg.levels.tolerance,
        }
    }

    fn finish(&self, command: &'static str, name: &str, pass: bool, data: Value, failure: Value) -> Result<Outcome, CliError> {
        self.art.json(name, command, pass, data)?;
        Ok(Outcome { command, pass, detail: if pass { Value::Null } else { failure } })
    }

    /// A certificate could not be produced: record the error as the failure.
    fn failed(&self, command: &'static str, name: &str, e: Error) -> Result<Outcome, CliError> {
        let detail = classify(e)?;
        self.finish(command, name, false, detail.clone(), detail)
    }
}

fn to_json<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("reports serialize")
}

fn gen(ctx: &Ctx) -> Result<Outcome, CliError> {
    let w = &ctx.window;
    ctx.art.text("window.txt", &format!("{w}\n"))?;
    let data = json!({
        "half": w.half(),
        "start": w.start(),
        "length": w.len(),
        "smallest_period": w.smallest_period(),
        "window": w.to_string(),
    });
    ctx.finish("gen", "window", true, data, Value::Null)
}

fn lang(ctx: &Ctx) -> Result<Outcome, CliError> {
    let l = &ctx.lang;
    let complexity: Vec<usize> = (0..=l.max_len()).map(|n| l.complexity(n).map_err(usage)).collect::<Result<_, _>>()?;
    ctx.art.csv("language", &l.to_csv())?;
    let data = json!({
        "depth": l.max_len(),
        "scan_region": [l.region().0, l.region().1],
        "complexity": complexity,
        "window_relative": true,
    });
    ctx.finish("lang", "language", true, data, Value::Null)
}

fn recurrence(ctx: &Ctx) -> Result<Outcome, CliError> {
    let max = ctx.cfg.levels.recurrence;
    ctx.lang.require_depth(max).map_err(usage)?;
    let mut reports = Vec::new();
    let mut failures = Vec::new();
    for n in 1..=max {
        for w in ctx.lang.words(n) {
            match ctx.lang.recurrence(&w) {
                Ok(r) => reports.push(to_json(&r)),
                Err(e @ Error::InsufficientOccurrences { .. }) => failures.push(e.to_string()),
                Err(e) => return Err(usage(e)),
            }
        }
    }
    let pass = failures.is_empty();
    let data = json!({ "max_len": max, "words": reports, "failures": failures, "window_relative": true });
    ctx.finish("recurrence", "recurrence", pass, data, json!({ "failures": failures }))
}

fn disagree(ctx: &Ctx) -> Result<Outcome, CliError> {
    let lv = &ctx.cfg.levels;
    let r = disagreeability_certificate(&ctx.lang, lv.disagree_len, lv.disagree_ceiling).map_err(usage)?;
    let failure = json!({ "witness": r.witness });
    ctx.finish("disagree", "disagree", r.pass, to_json(&r), failure)
}

fn axioms(ctx: &Ctx) -> Result<Outcome, CliError> {
    let lv = &ctx.cfg.levels;
    let space = LabeledSpace::new(&ctx.lang);
    let axioms = space.verify_axioms(lv.axioms).map_err(usage)?;
    let mut identities = vec![
        verify_tprime(&ctx.lang, lv.tprime).map_err(usage)?,
        verify_conjugation(&ctx.lang, lv.tprime).map_err(usage)?,
        verify_partition_axiom(&ctx.lang, lv.axioms).map_err(usage)?,
    ];
    let mut generators = Vec::new();
    for s in ctx.lang.symbols() {
        let t = t_generator(&ctx.lang, s, lv.tprime).map_err(usage)?;
        identities.extend(t.checks.iter().cloned());
        generators.push(t);
    }
    let mut failures = Vec::new();
    for a in axioms.iter().filter(|a| !a.pass) {
        failures.push(json!({ "axiom": a.axiom, "level": a.level, "counterexample": a.counterexample }));
    }
    for i in identities.iter().filter(|i| !i.pass) {
        failures.push(json!({ "identity": i.name, "failures": i.failures }));
    }
    let pass = failures.is_empty();
    let data = json!({
        "axioms": axioms,
        "shift_identities": identities[..3],
        "generators": generators,
    });
    ctx.finish("axioms", "axioms", pass, data, json!({ "failures": failures }))
}

fn cofinal(ctx: &Ctx) -> Result<Outcome, CliError> {
    let w = Word::from(ctx.cfg.levels.cofinal_word.as_str());
    let gap = match ctx.lang.recurrence(&w) {
        Ok(r) => r.max_gap as usize,
        Err(e) => return ctx.failed("cofinal", "cofinal", e),
    };
    let n = gap + w.len();
    match LabeledSpace::new(&ctx.lang).strong_cofinality_certificate(&w, n) {
        Ok(c) => ctx.finish("cofinal", "cofinal", true, to_json(&c), Value::Null),
        Err(e) => ctx.failed("cofinal", "cofinal", e),
    }
}

fn measure_compatibility(d: &BratteliDiagram, m: &FrequencyMeasure, tol: f64) -> Result<Vec<String>, CliError> {
    let mut bad = Vec::new();
    for k in 1..d.depth() {
        let edges = d.edges(k);
        for u in d.level(k) {
            let children: Vec<&Word> = edges.iter().filter(|(s, _)| s == u).map(|(_, t)| t).collect();
            let sum = m.total(children).map_err(usage)?;
            if !m.value(u).map_err(usage)?.agrees(&sum, tol) {
                bad.push(u.to_string());
            }
        }
    }
    Ok(bad)
}

fn bratteli(ctx: &Ctx) -> Result<Outcome, CliError> {
    let k = ctx.cfg.levels.bratteli;
    let d = build_bratteli(&ctx.lang, k).map_err(usage)?;
    ctx.art.dot("bratteli", &export_dot(&d))?;
    let expected: Vec<usize> = (1..=k).map(|j| ctx.lang.complexity(2 * j).map_err(usage)).collect::<Result<_, _>>()?;
    let sizes_ok = d.level_sizes() == expected;
    let structure = d.check_structure();
    let m = ctx.measure()?;
    let incompatible = measure_compatibility(&d, m, ctx.tol(m))?;
    let dims = if k >= 2 { Some(dimension_data(&d).map_err(usage)?) } else { None };
    let pass = sizes_ok && structure.is_ok() && incompatible.is_empty();
    let data = json!({
        "level_sizes": d.level_sizes(),
        "complexity": expected,
        "edge_count": d.edge_count(),
        "unique_incoming": structure.is_ok(),
        "measure_compatible": incompatible.is_empty(),
        "dimension_data": dims,
    });
    let failure = json!({
        "sizes_match_complexity": sizes_ok,
        "structure_violation": structure.err().map(|(lvl, w)| format!("level {lvl}: {w}")),
        "measure_incompatible": incompatible,
    });
    ctx.finish("bratteli", "bratteli", pass, data, failure)
}

fn phi(ctx: &Ctx) -> Result<Outcome, CliError> {
    let lv = &ctx.cfg.levels;
    let mut levels = Vec::new();
    let mut failures = Vec::new();
    let mut csv = String::from("level,source_size,target_size,rank,kernel_rank,cokernel_free_rank,torsion,k1_witness\n");
    for l in 1..=lv.phi {
        let map = phi_map(&ctx.lang, l).map_err(usage)?;
        let witness = k1_witness(&map);
        let snf = snf_report(&map);
        let certified = snf.verify(&map.matrix.to_big());
        if !witness.pass || !certified {
            failures.push(json!({ "level": l, "k1_witness": witness, "certificate": certified }));
        }
        let torsion: Vec<String> = snf.torsion().iter().map(|d| d.to_string()).collect();
        let _ = writeln!(
            csv,
            "{l},{},{},{},{},{},{},{}",
            map.source.len(),
            map.target.len(),
            snf.rank,
            snf.kernel_rank,
            snf.cokernel_free_rank,
            torsion.join(" "),
            witness.pass
        );
        levels.push(json!({
            "level": l,
            "source_size": map.source.len(),
            "target_size": map.target.len(),
            "k1_witness": witness.pass,
            "certificate_verified": certified,
            "snf": snf,
        }));
    }
    let mut naturality = Vec::new();
    for l in 1..=lv.naturality {
        let r = naturality_check(&ctx.lang, l).map_err(usage)?;
        if !r.pass {
            failures.push(to_json(&r));
        }
        naturality.push(r);
    }
    ctx.art.csv("phi", &csv)?;
    let pass = failures.is_empty();
    let data = json!({ "kind": "truncation data", "levels": levels, "naturality": naturality });
    ctx.finish("phi", "phi", pass, data, json!({ "failures": failures }))
}

fn k(ctx: &Ctx) -> Result<Outcome, CliError> {
    let lv = &ctx.cfg.levels;
    let r = k0_stabilization(&ctx.lang, lv.k0_from, lv.k0_to).map_err(usage)?;
    let failure = json!({
        "ill_defined_maps": r.connecting_maps.iter().filter(|c| !c.well_defined).map(|c| c.from).collect::<Vec<_>>(),
        "route_disagreements": r.route_checks.iter().filter(|c| !c.agree).map(|c| c.to).collect::<Vec<_>>(),
    });
    ctx.finish("k", "k0", r.consistent, to_json(&r), failure)
}

fn freq(ctx: &Ctx) -> Result<Outcome, CliError> {
    let m = ctx.measure()?;
    let tol = ctx.tol(m);
    let defect = m.consistency_defect().map_err(usage)?;
    let defect_ok = match m.mode() {
        Mode::Exact => defect == 0.0,
        Mode::Certified => defect <= 1e-9,
        Mode::Empirical => {
            let scan = m.scan_length().unwrap_or(1) as f64;
            defect <= 2.0 * m.depth() as f64 / scan
        }
    };
    let top = m.depth().min(ctx.lang.max_len());
    let mut support_mismatch = Vec::new();
    for n in 1..=top {
        if m.support(n) != ctx.lang.words(n) {
            support_mismatch.push(n);
        }
    }
    let mut empirical = None;
    let mut deviation = 0.0f64;
    if m.mode() != Mode::Empirical && 2 * ctx.cfg.scan >= MIN_EMPIRICAL_WINDOW {
        let e = empirical_frequencies(&ctx.source.window(ctx.cfg.scan).map_err(usage)?, m.depth().min(6))
            .map_err(usage)?;
        for n in 1..=e.depth() {
            for w in m.support(n).iter().chain(e.support(n).iter()) {
                let d = (m.value(w).map_err(usage)?.to_f64() - e.value(w).map_err(usage)?.to_f64()).abs();
                deviation = deviation.max(d);
            }
        }
        empirical = Some(e);
    }
    let agreement_ok = deviation <= ctx.cfg.levels.tolerance;
    let shift = shift_invariance_check(m, &ctx.lang, ctx.cfg.levels.shift, tol).map_err(usage)?;
    ctx.art.csv("frequencies", &m.to_csv(empirical.as_ref()).map_err(usage)?)?;
    let pass = defect_ok && support_mismatch.is_empty() && agreement_ok && shift.pass;
    let data = json!({
        "mode": m.mode(),
        "depth": m.depth(),
        "consistency_defect": defect,
        "support_mismatch_lengths": support_mismatch,
        "empirical": empirical.as_ref().map(|e| json!({
            "scan_length": e.scan_length(),
            "max_deviation": deviation,
            "tolerance": ctx.cfg.levels.tolerance,
        })),
        "shift_invariance": shift,
        "values": m,
    });
    let failure = json!({
        "consistency_defect": defect,
        "support_mismatch_lengths": support_mismatch,
        "max_deviation": deviation,
        "shift_witness": shift.witness,
    });
    ctx.finish("freq", "frequencies", pass, data, failure)
}

fn trace(ctx: &Ctx) -> Result<Outcome, CliError> {
    let m = ctx.measure()?;
    let tol = ctx.tol(m);
    let bound = ctx.cfg.levels.trace;
    ctx.lang.require_depth(bound).map_err(usage)?;
    let words: Vec<Word> = (0..=bound).flat_map(|n| ctx.lang.words(n)).collect();
    let one = m.value(&[]).map_err(usage)?;
    let unit = trace_eval(&GeneratorSymbol::new("", "", ""), m).map_err(usage)?;
    let unit_ok = unit.agrees(&one, tol);
    let mut off_diagonal_nonzero = Vec::new();
    let mut diagonal = serde_json::Map::new();
    for a in &words {
        for b in &words {
            let v = trace_eval(&GeneratorSymbol { alpha: a.clone(), nu: Word::empty(), beta: b.clone() }, m)
                .map_err(usage)?;
            if a == b {
                diagonal.insert(a.to_string(), json!(v));
            } else if !v.agrees(&MeasureValue::zero(m.mode()), 0.0) {
                off_diagonal_nonzero.push(format!("{a},{b}"));
            }
        }
    }
    let space = LabeledSpace::new(&ctx.lang);
    let tracial = tracial_property_check(&space, m, bound, tol).map_err(usage)?;
    let pass = unit_ok && off_diagonal_nonzero.is_empty() && tracial.pass;
    let data = json!({
        "mode": m.mode(),
        "unit": unit,
        "diagonal": diagonal,
        "off_diagonal_nonzero": off_diagonal_nonzero,
        "tracial": tracial,
    });
    let failure = json!({
        "unit": unit,
        "off_diagonal_nonzero": off_diagonal_nonzero,
        "tracial_witness": tracial.witness,
    });
    ctx.finish("trace", "trace", pass, data, failure)
}

fn dispatch(ctx: &Ctx, cmd: Command) -> Result<Outcome, CliError> {
    match cmd {
        Command::Gen => gen(ctx),
        Command::Lang => lang(ctx),
        Command::Recurrence => recurrence(ctx),
        Command::Disagree => disagree(ctx),
        Command::Axioms => axioms(ctx),
        Command::Cofinal => cofinal(ctx),
        Command::Bratteli => bratteli(ctx),
        Command::Phi => phi(ctx),
        Command::K => k(ctx),
        Command::Freq => freq(ctx),
        Command::Trace => trace(ctx),
        Command::VerifyAll => verify_all(ctx),
    }
}

fn verify_all(ctx: &Ctx) -> Result<Outcome, CliError> {
    let mut checks = Vec::new();
    let mut failures = serde_json::Map::new();
    for cmd in Command::CHECKS {
        let o = dispatch(ctx, cmd)?;
        if !o.pass {
            failures.insert(o.command.into(), o.detail.clone());
        }
        checks.push(json!({ "command": o.command, "pass": o.pass }));
    }
    let pass = failures.is_empty();
    let data = json!({ "checks": checks });
    ctx.finish("verify-all", "summary", pass, data, Value::Object(failures))
}

/// Runs one command against a configuration.
pub fn run(cmd: Command, cfg: &RunConfig) -> Result<Outcome, CliError> {
    let ctx = Ctx::new(cfg)?;
    dispatch(&ctx, cmd)
}
