//! Acceptance criteria 1-13. Prints one line per criterion and exits nonzero
//! if any fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use adelic_core::bundle::{height_primitive, min_search};
use adelic_core::gallery::{an_to_ambient, root_lattice_an};
use adelic_core::multinomial::{lcm_upto, p_bruteforce, p_closed_form, DEFAULT_COMPOSITION_CAP};
use adelic_core::suite::{run_all, Entry, Report, Verdict};
use adelic_core::{Bundle, Config, ExactPosReal};
use num_bigint::BigUint;

#[derive(Clone, Copy, PartialEq)]
enum Allow {
    Exact,
    Numeric,
    Conditional,
}

fn admissible(e: &Entry, allow: Allow) -> bool {
    match (&e.verdict, allow) {
        (Verdict::Holds, _) => true,
        (Verdict::HoldsNumerically { bits }, Allow::Numeric) => *bits > 0 || e.note.is_some(),
        (Verdict::ConsistentWithPaper, Allow::Conditional) => true,
        _ => false,
    }
}

/// Every entry under `prefix` is admissible and there are at least `min` of them.
fn statement(report: &Report, prefix: &str, allow: Allow, min: usize) -> Result<usize, String> {
    let entries: Vec<&Entry> = report.entries_for(prefix).collect();
    if entries.len() < min {
        return Err(format!("{prefix}: {} entries, expected at least {min}", entries.len()));
    }
    if let Some(bad) = entries.iter().find(|e| !admissible(e, allow)) {
        return Err(format!("{prefix} [{}]: {:?} {}", bad.instance, bad.verdict, bad.note.clone().unwrap_or_default()));
    }
    Ok(entries.len())
}

fn statements(report: &Report, items: &[(&str, Allow, usize)]) -> Result<String, String> {
    let mut total = 0;
    for &(p, a, m) in items {
        total += statement(report, p, a, m)?;
    }
    Ok(format!("{total} entries"))
}

fn timed<T>(limit: Duration, f: impl FnOnce() -> Result<T, String>) -> Result<String, String> {
    let t = Instant::now();
    f()?;
    let el = t.elapsed();
    if el > limit {
        return Err(format!("took {el:.1?}, target {limit:?}"));
    }
    Ok(format!("{el:.1?}"))
}

fn criterion1() -> Result<String, String> {
    timed(Duration::from_secs(60), || {
        for n in 1..=6 {
            for l in 1..=30 {
                let b = p_bruteforce(n, l, DEFAULT_COMPOSITION_CAP).map_err(|e| e.to_string())?.value;
                let c = p_closed_form(n, l).map_err(|e| e.to_string())?;
                if b != c {
                    return Err(format!("n={n}, l={l}: {b} != {c}"));
                }
            }
        }
        Ok(())
    })
}

fn criterion2() -> Result<String, String> {
    timed(Duration::from_secs(30), || {
        for l in 1..=1000u64 {
            let p = p_bruteforce(2, l, DEFAULT_COMPOSITION_CAP).map_err(|e| e.to_string())?.value;
            let lcm = lcm_upto(l + 1).map_err(|e| e.to_string())?;
            if p * BigUint::from(l + 1) != lcm {
                return Err(format!("l={l}"));
            }
        }
        Ok(())
    })
}

fn criterion6(report: &Report) -> Result<String, String> {
    let root2 = ExactPosReal::from_int(2).sqrt();
    for n in 1..=10 {
        let a = root_lattice_an(n).map_err(|e| e.to_string())?;
        let s = min_search(&a, 2, 4).map_err(|e| e.to_string())?;
        if s.value.exact() != Some(&root2) {
            return Err(format!("A_{n}: minimum {:?}", s.value));
        }
        let h = height_primitive(&a, &s.witness).map_err(|e| e.to_string())?;
        if h.exact() != Some(&root2) {
            return Err(format!("A_{n}: witness height"));
        }
        let ambient = an_to_ambient(&s.witness);
        let norm2: i64 = ambient.iter().map(|v| i64::try_from(v * v).unwrap_or(i64::MAX)).sum();
        if norm2 != 2 {
            return Err(format!("A_{n}: ambient witness is not a root"));
        }
        let st = min_search(&Bundle::standard(n), 2, 4).map_err(|e| e.to_string())?;
        if st.value.exact() != Some(&ExactPosReal::one()) {
            return Err(format!("standard({n}): minimum {:?}", st.value));
        }
    }
    statements(report, &[("minima.an", Allow::Exact, 10), ("minima.standard", Allow::Exact, 10)])
}

fn criterion10(report: &Report) -> Result<String, String> {
    let r = statements(report, &[
        ("ext.an_slope", Allow::Exact, 36),
        ("ext.an_minimum", Allow::Exact, 15),
        ("ext.an_wedge_witness", Allow::Exact, 15),
    ])?;
    for e in report.entries_for("ext.an_minimum") {
        let w = e.witness.as_ref().and_then(|w| w.get("wedge_of_first_l_roots")).and_then(|v| v.as_bool());
        if w != Some(true) {
            return Err(format!("ext.an_minimum [{}]: witness is not the wedge of the first roots", e.instance));
        }
    }
    Ok(r)
}

fn criterion11(report: &Report) -> Result<String, String> {
    let dims: Vec<usize> = report
        .entries_for("tzhi.lower")
        .filter_map(|e| e.instance.rsplit("dim=").next()?.parse().ok())
        .collect();
    if !dims.contains(&12) {
        return Err("no split bundle of dimension 12 checked".into());
    }
    statements(report, &[
        ("tzhi.lower", Allow::Exact, 20),
        ("tzhi.upper", Allow::Numeric, 20),
        ("tzhi.lambda", Allow::Exact, 20),
        ("tzhi.chain.left", Allow::Numeric, 1000),
        ("tzhi.chain.right", Allow::Numeric, 1000),
    ])
}

fn criterion12(report: &Report) -> Result<String, String> {
    let r = statements(report, &[
        ("prin.an_maxslope", Allow::Exact, 36),
        ("prin.an_mum", Allow::Exact, 36),
        ("prin.an_minimum", Allow::Exact, 36),
        ("prin.an_pure_witness", Allow::Exact, 36),
        ("prin.an_lower", Allow::Conditional, 36),
        ("prin.split.lower", Allow::Exact, 10),
        ("prin.split.upper", Allow::Exact, 10),
        ("prin.split.mum_lower", Allow::Exact, 10),
        ("prin.split.mum_upper", Allow::Exact, 10),
        ("prin.split.prin", Allow::Exact, 10),
    ])?;
    for e in report.entries_for("prin.an_maxslope") {
        let skipped = e.witness.as_ref().and_then(|w| w.get("skipped")).and_then(|v| v.as_u64());
        if skipped != Some(0) {
            return Err(format!("prin.an_maxslope [{}]: skipped candidates", e.instance));
        }
    }
    Ok(r)
}

fn criterion13(report: &Report, config: &Config) -> Result<String, String> {
    let r = statements(report, &[
        ("convexe.inequality", Allow::Numeric, 500),
        ("convexe.min_identity", Allow::Exact, 50),
        ("prodformula", Allow::Exact, 1),
    ])?;
    let again = run_all(config).map_err(|e| e.to_string())?;
    if again.to_json() != report.to_json() {
        return Err("two runs produced different JSON reports".into());
    }
    Ok(format!("{r}, byte-identical reruns"))
}

fn main() -> ExitCode {
    let config = Config::default();
    let t = Instant::now();
    let report = match run_all(&config) {
        Ok(r) => r,
        Err(e) => {
            println!("FAIL  run_all: {e}");
            return ExitCode::FAILURE;
        }
    };
    println!("full report: {} entries in {:.1?}", report.entries.len(), t.elapsed());
    use Allow::*;
    let results: Vec<(u32, &str, Result<String, String>)> = vec![
        (1, "multinomial lcm identity, n <= 6, l <= 30", criterion1()),
        (2, "p(2,l)(l+1) = lcm(1..l+1), l <= 1000", criterion2()),
        (3, "q = r = s, 2 <= n <= 5, l <= 15", statements(&report, &[
            ("thmppcm.chain.q_r", Exact, 60),
            ("thmppcm.chain.r_s", Exact, 60),
            ("thmppcm.lemma", Exact, 112),
        ])),
        (4, "bounds on p(n,l) and d(m)^2 <= 8^m", statements(&report, &[
            ("thmppcm.bounds.lower", Exact, 180),
            ("thmppcm.bounds.upper", Exact, 180),
            ("thmppcm.psi", Exact, 1),
        ])),
        (5, "slopes of standard, A_n, E_1/4 and derived bundles", statements(&report, &[
            ("slopes.standard", Exact, 50),
            ("slopes.an", Exact, 50),
            ("slopes.eq", Exact, 1),
            ("slopes.dual", Exact, 100),
            ("slopes.tensor", Exact, 100),
            ("slopes.ext", Exact, 100),
            ("slopes.sum", Exact, 100),
            ("slopes.full_basis", Exact, 100),
        ])),
        (6, "minima of A_n and standard(n), n <= 10", criterion6(&report)),
        (7, "counterexample E_1/4", statements(&report, &[
            ("ce.precondition", Exact, 1),
            ("ce.height_e1", Exact, 1),
            ("ce.tensor_height", Exact, 1),
            ("ce.strict", Exact, 1),
            ("ce.lemma", Exact, 1),
            ("ce.lemma_min", Exact, 1),
            ("ce.minimum", Conditional, 1),
            ("ce.conclusion", Conditional, 1),
        ])),
        (8, "Minkowski-Hlawka bundles, 2 <= n <= 6", statements(&report, &[
            ("mha.construct", Exact, 5),
            ("mha.q_lower", Exact, 5),
            ("mha.q_sqrt_n_over_e", Numeric, 5),
            ("mha.height_e1", Exact, 5),
            ("mha.search", Exact, 5),
            ("mha.t_bound", Exact, 5),
            ("mha.minimum", Conditional, 5),
        ])),
        (9, "symmetric powers, n, l <= 12", statements(&report, &[
            ("pentesym.closed_form", Exact, 144),
            ("pentesym.lower", Exact, 144),
            ("pentesym.upper", Exact, 144),
            ("pentesym.semistable", Exact, 144),
            ("pentesym.cap", Exact, 144),
        ])),
        (10, "exterior powers of A_n", criterion10(&report)),
        (11, "Zhang sandwich on split bundles and the standard chain", criterion11(&report)),
        (12, "A_n tensor standard(m) and split tensor products", criterion12(&report)),
        (13, "convexity, product formula, determinism", criterion13(&report, &config)),
    ];
    let mut failed = 0;
    for (k, name, r) in &results {
        match r {
            Ok(detail) => println!("PASS  criterion {k:>2}: {name} ({detail})"),
            Err(why) => {
                failed += 1;
                println!("FAIL  criterion {k:>2}: {name}: {why}");
            }
        }
    }
    if report.violated() > 0 {
        failed += 1;
        println!("FAIL  full report has {} violated entries", report.violated());
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
