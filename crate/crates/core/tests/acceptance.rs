//! Acceptance criteria, one PASS/FAIL line each. Runs without the test harness
//! so the lines are always printed; exits nonzero if any criterion fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use pealab::closure::full_set_algebra;
use pealab::eval::{check_all, CheckMode};
use pealab::lemmas::{lemma_x_check, lemma_y_search, plane_system};
use pealab::partitions::{
    build_h_cylfree, build_h_diagfree, build_k, r0_times_t, verify_family, DoublingSplit,
};
use pealab::reducts::{certificate, merge_construction, reduct_rep_cylfree, reduct_rep_diagfree};
use pealab::space::Space;
use pealab::suites::{suite_f, suite_p};
use pealab::witness::witness_report;
use pealab::{CheckReport, PolyadicModel, DEFAULT_BUDGET};

type Outcome = Result<(), String>;
type Criterion = (&'static str, fn() -> Outcome);

fn require(ok: bool, what: impl Into<String>) -> Outcome {
    if ok {
        Ok(())
    } else {
        Err(what.into())
    }
}

fn require_report(report: &CheckReport, what: &str) -> Outcome {
    match report.failures().next() {
        None => Ok(()),
        Some(r) => Err(format!(
            "{what}: {} failed {}",
            r.name,
            r.witness.clone().unwrap_or_default()
        )),
    }
}

fn model(p: usize, alpha: usize) -> Result<PolyadicModel, String> {
    PolyadicModel::build(p, alpha, DEFAULT_BUDGET)
        .map_err(|e| format!("build p={p} alpha={alpha}: {e}"))
}

fn construction_soundness() -> Outcome {
    for (p, alpha) in [(3, 3), (5, 3), (7, 3), (3, 4)] {
        let tag = format!("p={p} alpha={alpha}");
        let m = model(p, alpha)?;
        require_report(&m.plane.verify(), &format!("{tag} plane"))?;
        require_report(&m.lyndon.verify(), &format!("{tag} parallel classes"))?;
        require_report(&m.tails.verify(), &format!("{tag} T blocks"))?;
        let target = r0_times_t(&m.base, &m.plane);
        require_report(&verify_family(&m.q, &target), &format!("{tag} Q"))?;
        let k = build_k(&m.base, &m.plane, &m.tails).map_err(|e| e.to_string())?;
        require_report(&verify_family(&k, &target), &format!("{tag} K"))?;
        let hc = build_h_cylfree(&m.base, &m.plane, &m.tails);
        require_report(&verify_family(&hc, &target), &format!("{tag} H cylfree"))?;
        let hd = build_h_diagfree(&m.q, DoublingSplit::default()).map_err(|e| e.to_string())?;
        let doubled_target = m.base.space.double_relation(&target, &hd.space);
        require_report(
            &verify_family(&hd, &doubled_target),
            &format!("{tag} H diagfree"),
        )?;
        require_report(
            &m.verify().map_err(|e| e.to_string())?,
            &format!("{tag} model"),
        )?;
    }
    Ok(())
}

fn atom_cross_check() -> Outcome {
    for (p, alpha) in [(3, 3), (5, 3), (3, 4)] {
        let m = model(p, alpha)?;
        let report = m
            .check_atom_formula(DEFAULT_BUDGET)
            .map_err(|e| e.to_string())?;
        require_report(&report, &format!("p={p} alpha={alpha}"))?;
    }
    Ok(())
}

fn axiom_suites() -> Outcome {
    let mode = CheckMode::default();
    let p = suite_p(3).map_err(|e| e.to_string())?;
    let f = suite_f(3).map_err(|e| e.to_string())?;
    for q in [3, 5] {
        let m = model(q, 3)?;
        require_report(
            &check_all(&m.ap, &p, mode, DEFAULT_BUDGET),
            &format!("P on A_{q}"),
        )?;
        require_report(
            &check_all(&m.ap, &f, mode, DEFAULT_BUDGET),
            &format!("F on A_{q}"),
        )?;
    }
    let full = full_set_algebra(&Space::new(3, 3).map_err(|e| e.to_string())?)
        .map_err(|e| e.to_string())?
        .algebra;
    require_report(
        &check_all(&full, &p, mode, DEFAULT_BUDGET),
        "P on full set algebra",
    )?;
    require_report(
        &check_all(&full, &f, mode, DEFAULT_BUDGET),
        "F on full set algebra",
    )
}

fn witness_behaviour() -> Outcome {
    let r3 = witness_report(&model(3, 3)?, &[3, 5], DEFAULT_BUDGET).map_err(|e| e.to_string())?;
    for name in [
        "E3_distinguished",
        "e3_refuted",
        "E30_sat_recovers_lyndon",
        "e5_valid",
    ] {
        require(
            r3.record(name).is_some_and(|r| r.passed()),
            format!("A_3 {name}"),
        )?;
    }
    let r5 = witness_report(&model(5, 3)?, &[5, 3], DEFAULT_BUDGET).map_err(|e| e.to_string())?;
    for name in ["E50_sat_recovers_lyndon", "e3_valid"] {
        require(
            r5.record(name).is_some_and(|r| r.passed()),
            format!("A_5 {name}"),
        )?;
    }
    Ok(())
}

fn reduct_representations() -> Outcome {
    for p in [3, 5] {
        let rep = reduct_rep_cylfree(&model(p, 3)?).map_err(|e| e.to_string())?;
        require_report(&rep.iso.report, &format!("cylfree p={p}"))?;
        require(
            rep.sanity.passed(),
            format!("cylfree p={p}: cyl unexpectedly preserved"),
        )?;
    }
    let rep =
        reduct_rep_diagfree(&model(3, 3)?, DoublingSplit::default()).map_err(|e| e.to_string())?;
    require(rep.table.space.base_size() == 22, "doubled base size")?;
    require_report(&rep.iso.report, "diagfree p=3")?;
    require(
        rep.sanity.passed(),
        "diagfree p=3: diagonal unexpectedly preserved",
    )
}

fn merge() -> Outcome {
    let m = model(5, 3)?;
    let merged = merge_construction(&m, 0, 3).map_err(|e| e.to_string())?;
    require(
        merged.classes.len() == 3,
        format!("classes {:?}", merged.classes),
    )?;
    require_report(&merged.iso.report, "h: C -> D")?;
    require(merged.iso.ops.len() == 4, "full signature")
}

fn lemma_kernels() -> Outcome {
    for p in [3u64, 5] {
        let system = plane_system(p).map_err(|e| e.to_string())?;
        let report = lemma_x_check(&system).map_err(|e| e.to_string())?;
        require_report(&report, &format!("class sizes p={p}"))?;
        let sizes = &report.records[0].detail.as_ref().expect("sizes")["class_sizes"];
        require(
            sizes.as_array().is_some_and(|s| s.iter().all(|v| v == p)),
            "class size p",
        )?;
    }
    for n in 2..=6 {
        let found = lemma_y_search(n, DEFAULT_BUDGET).map_err(|e| e.to_string())?;
        require(found.exists() == (n % 2 == 0), format!("n = {n}"))?;
    }
    Ok(())
}

fn nonrepresentability_certificate() -> Outcome {
    for p in [3, 5] {
        require_report(&certificate(&model(p, 3)?), &format!("p={p}"))?;
    }
    Ok(())
}

fn determinism() -> Outcome {
    let digest = || -> Result<Vec<String>, String> {
        let m = model(3, 3)?;
        let eqs = suite_p(3).map_err(|e| e.to_string())?;
        let mode = CheckMode::Sampled {
            seed: 42,
            samples: 500,
        };
        let axioms = check_all(&m.ap, &eqs, mode, DEFAULT_BUDGET);
        let witness = witness_report(&m, &[3, 5], DEFAULT_BUDGET).map_err(|e| e.to_string())?;
        let reducts =
            pealab::reducts::reducts_report(&m, Some((0, 1))).map_err(|e| e.to_string())?;
        Ok(vec![axioms.digest(), witness.digest(), reducts.digest()])
    };
    let first = digest()?;
    let second = digest()?;
    require(first == second, format!("{first:?} vs {second:?}"))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("construction soundness", construction_soundness),
        ("atom cross-check", atom_cross_check),
        ("axiom suites", axiom_suites),
        ("witness behaviour", witness_behaviour),
        ("reduct representability", reduct_representations),
        ("merge construction", merge),
        ("combinatorial kernels", lemma_kernels),
        (
            "nonrepresentability certificate",
            nonrepresentability_certificate,
        ),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (n, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome =
            catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(()) => println!("PASS {} {name} ({secs:.1}s)", n + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {} {name} ({secs:.1}s): {why}", n + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
