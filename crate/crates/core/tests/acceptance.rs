//! Acceptance criteria. Each test prints one `PASS`/`FAIL` line, written
//! directly to the process stderr so it survives output capture.

mod common;

use std::collections::BTreeSet;
use std::io::Write;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::*;
use probdl::generate::{random_instance, synthetic, synthetic_query, RandomKbParams};
use probdl::tableau::Limits;
use probdl::{
    all_justifications, enumerate_worlds, formula_from_justifications, parse_kb,
    probability_bruteforce, probability_query, serialize_kb, Axiom, BddManager, Budget, Concept,
    Engine, Justification, Method, MonotoneFormula, Query, QueryConfig, Reasoner,
};

const FUZZ_SEEDS: u64 = 200;

fn report(id: &str, what: &str, outcome: Result<String, String>) {
    let line = match &outcome {
        Ok(detail) => format!("PASS [{id}] {what}: {detail}\n"),
        Err(detail) => format!("FAIL [{id}] {what}: {detail}\n"),
    };
    let _ = std::io::stderr().write_all(line.as_bytes());
    if let Err(detail) = outcome {
        panic!("criterion {id} failed: {detail}");
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn crime_query() -> Query {
    Query::instance("raskolnikov", Concept::atomic("GreatMan"))
}

fn configs() -> Vec<QueryConfig> {
    let mut out = Vec::new();
    for engine in [Engine::Bdd, Engine::BruteForce] {
        for method in [Method::GlassBox, Method::BlackBox] {
            out.push(QueryConfig {
                method,
                engine,
                ..QueryConfig::default()
            });
        }
    }
    out
}

#[test]
fn criterion_1_crime_kb_probability_and_covering_set() {
    let check = || -> Result<String, String> {
        let start = Instant::now();
        let kb = parse_kb(CRIME).map_err(|e| e.to_string())?;
        // beta1, alpha1, beta2, beta3 in file order.
        ensure(
            matches!(&kb.axiom(0).axiom, Axiom::SubClassOf { sup, .. } if *sup == Concept::atomic("GreatMan"))
                && matches!(&kb.axiom(1).axiom, Axiom::SubClassOf { sup, .. } if *sup == Concept::atomic("Nihilist"))
                && matches!(&kb.axiom(2).axiom, Axiom::RoleAssertion { object, .. } if object == "alyona")
                && matches!(&kb.axiom(3).axiom, Axiom::RoleAssertion { object, .. } if object == "lizaveta"),
            || "unexpected axiom order in crime.kb".into(),
        )?;
        let q = crime_query();
        let expected = vec![Justification::new([0, 1, 2]), Justification::new([0, 1, 3])];
        for config in configs() {
            let r = probability_query(&kb, &q, &config).map_err(|e| e.to_string())?;
            ensure(close(r.probability, 0.176, 1e-12), || {
                format!("{}/{}: {}", config.engine, config.method, r.probability)
            })?;
            if let Some(cs) = &r.covering_set {
                ensure(cs.justifications == expected, || {
                    format!("{}: covering set {:?}", config.method, cs.justifications)
                })?;
            }
        }
        let elapsed = start.elapsed();
        ensure(elapsed < Duration::from_secs(1), || {
            format!("took {elapsed:?}")
        })?;
        Ok(format!(
            "0.176 under 2 engines x 2 methods, covering set {{0, 1, 2}} {{0, 1, 3}}, {:.1} ms",
            elapsed.as_secs_f64() * 1e3
        ))
    };
    report("1", "crime KB", check());
}

#[test]
fn criterion_2_diagram_replay() {
    let check = || -> Result<String, String> {
        use MonotoneFormula::{And, Or, Var};
        let f = Or(vec![And(vec![Var(0), Var(1)]), And(vec![Var(0), Var(2)])]);
        let mut m = BddManager::new(3);
        let root = m.build(&f).map_err(|e| e.to_string())?;
        ensure(m.node_count(root) == 3, || {
            format!("{} nodes", m.node_count(root))
        })?;
        let t = m
            .traverse(root, &[0.2, 0.6, 0.7])
            .map_err(|e| e.to_string())?;
        let n1 = m.node(root).ok_or("root is terminal")?;
        let n2 = m.node(n1.high).ok_or("x1 high child is terminal")?;
        let n3 = m.node(n2.low).ok_or("x2 low child is terminal")?;
        ensure(
            n1.low.is_terminal() && n2.high.is_terminal() && n3.level == 2,
            || "diagram shape differs from (x1 and x2) or (x1 and x3)".into(),
        )?;
        let (v2, v3) = (t.values[&n1.high], t.values[&n2.low]);
        ensure(close(v3, 0.7, 1e-12) && close(v2, 0.88, 1e-12), || {
            format!("node values {v3} and {v2}")
        })?;
        ensure(close(t.probability, 0.176, 1e-12), || {
            format!("{}", t.probability)
        })?;
        Ok("3 internal nodes, memo values 0.7 and 0.88, root 0.176".into())
    };
    report("2", "diagram replay", check());
}

#[test]
fn criterion_3_dnf_equivalent_to_compact_formula() {
    let check = || -> Result<String, String> {
        let kb = parse_kb(CRIME).map_err(|e| e.to_string())?;
        let cs = all_justifications(&kb, &crime_query(), Method::GlassBox, &Budget::default())
            .map_err(|e| e.to_string())?;
        let dnf = formula_from_justifications(&cs, &kb);
        use MonotoneFormula::{And, Or, Var};
        let compact = And(vec![Var(0), Or(vec![Var(1), Var(2)])]);
        let mut m = BddManager::new(kb.probabilistic_count());
        let (a, b) = (
            m.build(&dnf).map_err(|e| e.to_string())?,
            m.build(&compact).map_err(|e| e.to_string())?,
        );
        ensure(m.equivalent(a, b), || {
            format!("{dnf} differs from {compact}")
        })?;
        Ok(format!("{dnf} == {compact}"))
    };
    report("3", "pinpointing formula equivalence", check());
}

#[test]
fn criterion_4_layered_scaling() {
    let check = || -> Result<String, String> {
        for n in [2, 4, 6] {
            let kb = synthetic(n).map_err(|e| e.to_string())?;
            for method in [Method::GlassBox, Method::BlackBox] {
                let cs = all_justifications(&kb, &synthetic_query(n), method, &Budget::default())
                    .map_err(|e| e.to_string())?;
                ensure(cs.len() == 1 << n, || {
                    format!("n={n} {method}: {} justifications", cs.len())
                })?;
            }
        }
        for n in 1..=5 {
            let kb = synthetic(n).map_err(|e| e.to_string())?;
            let q = synthetic_query(n);
            let p = probability_query(&kb, &q, &QueryConfig::default())
                .map_err(|e| e.to_string())?
                .probability;
            let bf = probability_bruteforce(&kb, &q, 20, &Budget::default())
                .map_err(|e| e.to_string())?;
            let exact = 0.504f64.powi(n as i32);
            ensure(close(p, bf, 1e-9) && close(p, exact, 1e-9), || {
                format!("n={n}: pipeline {p}, brute force {bf}, closed form {exact}")
            })?;
        }
        let start = Instant::now();
        let r = probability_query(
            &synthetic(8).map_err(|e| e.to_string())?,
            &synthetic_query(8),
            &QueryConfig::default(),
        )
        .map_err(|e| e.to_string())?;
        let t8 = start.elapsed();
        ensure(
            r.covering_set.as_ref().map(|c| c.len()) == Some(256),
            || "n=8 count".into(),
        )?;
        ensure(close(r.probability, 0.504f64.powi(8), 1e-9), || {
            format!("n=8: {}", r.probability)
        })?;
        Ok(format!(
            "2^n justifications for n = 2, 4, 6; 0.504^n for n <= 5; n = 8 in {:.3} s",
            t8.as_secs_f64()
        ))
    };
    report("4", "layered scaling", check());
}

#[test]
fn criterion_5_oracle_equivalence_fuzz() {
    let check = || -> Result<String, String> {
        let params = RandomKbParams::default();
        let mut entailed = 0;
        for seed in 0..FUZZ_SEEDS {
            let (kb, q) = random_instance(seed, params);
            ensure(kb.len() <= 10 && kb.probabilistic_count() <= 8, || {
                format!("seed {seed}: size")
            })?;
            let err = |e: probdl::Error| format!("seed {seed}: {e}");
            let bf = probability_bruteforce(&kb, &q, 20, &Budget::default()).map_err(err)?;
            let oracle = powerset_justifications(&kb, &q);
            let mut found = Vec::new();
            for method in [Method::GlassBox, Method::BlackBox] {
                let config = QueryConfig {
                    method,
                    ..QueryConfig::default()
                };
                let r = probability_query(&kb, &q, &config).map_err(err)?;
                ensure(close(r.probability, bf, 1e-9), || {
                    format!("seed {seed} {method}: {} vs {bf}", r.probability)
                })?;
                let cs = r.covering_set.expect("bdd engine reports justifications");
                ensure(cs.justifications == oracle, || {
                    format!(
                        "seed {seed} {method}: {:?} vs {:?}",
                        cs.justifications, oracle
                    )
                })?;
                found.push(cs.justifications);
            }
            ensure(found[0] == found[1], || {
                format!("seed {seed}: methods disagree")
            })?;
            if !oracle.is_empty() {
                entailed += 1;
            }
        }
        Ok(format!(
            "{FUZZ_SEEDS} seeds agree ({entailed} with an entailed query)"
        ))
    };
    report("5", "oracle-equivalence fuzz", check());
}

fn random_formula(rng: &mut ChaCha8Rng, vars: usize, depth: usize) -> MonotoneFormula {
    if depth == 0 || rng.gen_bool(0.3) {
        return match rng.gen_range(0..12) {
            0 => MonotoneFormula::True,
            1 => MonotoneFormula::False,
            _ => MonotoneFormula::Var(rng.gen_range(0..vars)),
        };
    }
    let args = (0..rng.gen_range(1..4))
        .map(|_| random_formula(rng, vars, depth - 1))
        .collect();
    if rng.gen_bool(0.5) {
        MonotoneFormula::And(args)
    } else {
        MonotoneFormula::Or(args)
    }
}

#[test]
fn criterion_6_invariant_suites() {
    let minimality = || -> Result<String, String> {
        for seed in 0..FUZZ_SEEDS {
            let (kb, q) = random_instance(seed, RandomKbParams::default());
            let cs = all_justifications(&kb, &q, Method::GlassBox, &Budget::default())
                .map_err(|e| e.to_string())?;
            for j in cs.iter() {
                let entails = |s: &BTreeSet<usize>| probdl::entails(&kb, s, &q, Limits::default());
                ensure(entails(j.indices()).unwrap(), || {
                    format!("seed {seed}: {j} not entailing")
                })?;
                for i in j.iter() {
                    let mut smaller = j.indices().clone();
                    smaller.remove(&i);
                    ensure(!entails(&smaller).unwrap(), || {
                        format!("seed {seed}: {j} not minimal")
                    })?;
                }
                for k in cs.iter() {
                    ensure(j == k || !j.indices().is_subset(k.indices()), || {
                        format!("seed {seed}: {j} inside {k}")
                    })?;
                }
            }
        }
        Ok(format!("{FUZZ_SEEDS} covering sets"))
    };
    let canonicity = || -> Result<String, String> {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..500 {
            let (f, g) = (
                random_formula(&mut rng, 6, 4),
                random_formula(&mut rng, 6, 4),
            );
            let mut m = BddManager::new(6);
            let (bf, bg) = (m.build(&f).unwrap(), m.build(&g).unwrap());
            let same = valuations(6).all(|v| f.satisfies(&v) == g.satisfies(&v));
            ensure(m.equivalent(bf, bg) == same, || format!("{f} vs {g}"))?;
        }
        Ok("500 formula pairs over 6 variables".into())
    };
    let pinpointing = || -> Result<String, String> {
        for seed in 0..FUZZ_SEEDS {
            let (kb, q) = random_instance(seed, RandomKbParams::default());
            let cs = all_justifications(&kb, &q, Method::GlassBox, &Budget::default())
                .map_err(|e| e.to_string())?;
            let f = formula_from_justifications(&cs, &kb);
            let mut r = Reasoner::new(&kb, Limits::default());
            let goal = r.goal(&q);
            for (world, _) in enumerate_worlds(&kb, 10).map_err(|e| e.to_string())? {
                let v = world
                    .selection()
                    .iter()
                    .filter(|a| a.selected)
                    .map(|a| a.ordinal)
                    .collect();
                let entailed = r.entails(&r.mask_of(world.axioms(&kb)), &goal).unwrap();
                ensure(entailed == f.satisfies(&v), || {
                    format!("seed {seed}: valuation {v:?}")
                })?;
            }
        }
        Ok(format!("{FUZZ_SEEDS} KBs, every valuation"))
    };
    let normalization = || -> Result<String, String> {
        for seed in 0..FUZZ_SEEDS {
            let (kb, _) = random_instance(seed, RandomKbParams::default());
            let total: f64 = enumerate_worlds(&kb, 20).unwrap().map(|(_, w)| w).sum();
            ensure(close(total, 1.0, 1e-9), || format!("seed {seed}: {total}"))?;
        }
        Ok(format!("{FUZZ_SEEDS} KBs"))
    };
    let round_trip = || -> Result<String, String> {
        let crime = parse_kb(CRIME).unwrap();
        ensure(parse_kb(&serialize_kb(&crime)).unwrap() == crime, || {
            "crime.kb".into()
        })?;
        for seed in 0..FUZZ_SEEDS {
            let (kb, _) = random_instance(seed, RandomKbParams::default());
            ensure(parse_kb(&serialize_kb(&kb)).as_ref() == Ok(&kb), || {
                format!("seed {seed}")
            })?;
        }
        for n in 1..=8 {
            let kb = synthetic(n).unwrap();
            ensure(parse_kb(&serialize_kb(&kb)).as_ref() == Ok(&kb), || {
                format!("layered n={n}")
            })?;
        }
        Ok(format!(
            "crime.kb, {FUZZ_SEEDS} random KBs, layered n = 1..8"
        ))
    };

    let mut failed = Vec::new();
    for (id, what, check) in [
        (
            "6a",
            "minimality and antichain",
            &minimality as &dyn Fn() -> Result<String, String>,
        ),
        ("6b", "diagram canonicity", &canonicity),
        ("6c", "pinpointing property", &pinpointing),
        ("6d", "world weight normalization", &normalization),
        ("6e", "parser round trip", &round_trip),
    ] {
        let outcome = check();
        let line = match &outcome {
            Ok(d) => format!("PASS [{id}] {what}: {d}\n"),
            Err(d) => format!("FAIL [{id}] {what}: {d}\n"),
        };
        let _ = std::io::stderr().write_all(line.as_bytes());
        if outcome.is_err() {
            failed.push(id);
        }
    }
    assert!(failed.is_empty(), "failed invariant suites: {failed:?}");
}
