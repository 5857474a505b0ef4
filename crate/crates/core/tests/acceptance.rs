use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use stabnull_core::circuit::random::random_clifford_t;
use stabnull_core::circuit::{special_family, toffoli_clifford_t};
use stabnull_core::nullity::{compute_s_state, compute_s_unitary, subgroup_p_u, unitary_pauli_function};
use stabnull_core::stabilizer::{
    aux_nullity, enumerate_stabilizer_states, max_state_nullity, maximally_entangled, plus_state_index,
};
use stabnull_core::theorems::{ccz_marginals, counterexample_values, f_brute, f_closed_form, run_check, Scale};
use stabnull_core::{build_unitary, Circuit, ExactMatrix, ExactScalar as E, PauliLabel, Scalar, StateVector};

const SEEDS: [u64; 5] = [1, 2, 3, 5, 8];

type Criterion = (u32, &'static str, Duration, Box<dyn Fn() -> Outcome>);

struct Outcome {
    passed: bool,
    detail: String,
}

fn ok(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome { passed, detail: detail.into() }
}

fn exact(c: &Circuit) -> ExactMatrix {
    build_unitary(c).expect("exact circuit")
}

fn circ(s: &str) -> Circuit {
    s.parse().expect("circuit text")
}

fn nullity(c: &Circuit) -> u32 {
    compute_s_unitary(&exact(c)).expect("nullity").nullity
}

fn t_transfer_matrix() -> Outcome {
    let u = exact(&circ("qubits 1\nt 0\n"));
    let h = E::inv_sqrt2();
    let (one, zero) = (E::one(), E::zero());
    let want = [
        [one.clone(), zero.clone(), zero.clone(), zero.clone()],
        [zero.clone(), h.clone(), -h.clone(), zero.clone()],
        [zero.clone(), h.clone(), h.clone(), zero.clone()],
        [zero.clone(), zero.clone(), zero, one],
    ];
    let order: Vec<PauliLabel> = ["I", "X", "Y", "Z"].iter().map(|s| s.parse().unwrap()).collect();
    let mut matches = true;
    for (r, a) in order.iter().enumerate() {
        for (c, b) in order.iter().enumerate() {
            matches &= unitary_pauli_function(&u, a, b).expect("entry") == want[r][c];
        }
    }
    let r = compute_s_unitary(&u).expect("report");
    ok(matches && r.s == 2 && r.nullity == 1, format!("v(T)={} s={} matrix_match={matches}", r.nullity, r.s))
}

fn ccz_nullities() -> Outcome {
    let u = exact(&circ("qubits 3\nccz 0 1 2\n"));
    let v = compute_s_unitary(&u).expect("report").nullity;
    let vs = compute_s_state(&u.apply(&StateVector::plus_state(3)).unwrap()).unwrap().nullity;
    let set = enumerate_stabilizer_states::<E>(3).expect("enumeration");
    let m = max_state_nullity(&u, &set).expect("max");
    let plus = plus_state_index(&set).expect("|+++> enumerated");
    let at_plus = compute_s_state(&u.apply(&set.states()[plus]).unwrap()).unwrap().nullity;
    ok(
        v == 3 && vs == 3 && set.len() == 1080 && m.max == 3 && at_plus == m.max,
        format!("v={v} v_s(+++)={vs} states={} max={} attained_at_plus={}", set.len(), m.max, at_plus == m.max),
    )
}

fn special_family_at(n: usize) -> Outcome {
    let u = exact(&special_family(n));
    let r = compute_s_unitary(&u).expect("report");
    let trivial = subgroup_p_u(&u).expect("subgroup").size() == 1;
    ok(r.s == 1 && r.nullity == 2 * n as u32 && trivial, format!("n={n} v={} s={} P_U trivial={trivial}", r.nullity, r.s))
}

fn strict_separation() -> Outcome {
    let u = exact(&special_family(3));
    let v = compute_s_unitary(&u).unwrap().nullity;
    let set = enumerate_stabilizer_states::<E>(3).unwrap();
    let m = max_state_nullity(&u, &set).unwrap();
    ok(m.max <= 3 && m.max < v && v == 6, format!("state max={} v={v} over {} inputs", m.max, set.len()))
}

fn ancilla_attainment() -> Outcome {
    let mut corpus = vec![circ("qubits 1\nt 0\n"), circ("qubits 1\nt 0\ns 0\n")];
    corpus.extend(ccz_marginals());
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for _ in 0..50 {
        let n = rng.gen_range(1..=2);
        corpus.push(random_clifford_t(n, 4 * n + 6, &mut rng));
    }
    let failures = corpus
        .iter()
        .filter(|c| {
            let u = exact(c);
            let phi = maximally_entangled::<E>(c.width()).unwrap();
            aux_nullity(&u, &phi).unwrap() != compute_s_unitary(&u).unwrap().nullity
        })
        .count();
    ok(failures == 0, format!("{} circuits, {failures} failures", corpus.len()))
}

fn property_suite() -> Outcome {
    let names = [
        "faithfulness",
        "clifford_invariance",
        "tensor_additivity",
        "subadditivity",
        "intersection_bound",
        "integrality",
        "state_stab_equivalence",
        "lagrange",
    ];
    let mut failed = Vec::new();
    for seed in SEEDS {
        for name in names {
            let r = run_check(name, seed, Scale::Standard).expect("known check");
            if !r.passed {
                failed.push(format!("{name}@{seed}"));
            }
        }
    }
    let runs = SEEDS.len() * names.len();
    ok(failed.is_empty(), format!("{runs} runs over seeds {SEEDS:?}, failed: {failed:?}"))
}

fn f_identity() -> Outcome {
    let bits = |n: usize, m: u64| (0..n).map(|i| m >> i & 1 == 1).collect::<Vec<_>>();
    let mut mismatches = 0;
    let mut cases = 0;
    for q in 0..8 {
        for s in 0..8 {
            for p in 0..8 {
                let (q, s, p) = (bits(3, q), bits(3, s), bits(3, p));
                cases += 1;
                mismatches += (f_closed_form(&q, &s, &p).unwrap() != f_brute(&q, &s, &p).unwrap()) as usize;
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for n in [4usize, 5] {
        for _ in 0..10_000 {
            let mut draw = || bits(n, rng.gen::<u64>());
            let (q, s, p) = (draw(), draw(), draw());
            cases += 1;
            mismatches += (f_closed_form(&q, &s, &p).unwrap() != f_brute(&q, &s, &p).unwrap()) as usize;
        }
    }
    ok(mismatches == 0, format!("{cases} triples, {mismatches} mismatches"))
}

fn counterexample() -> Outcome {
    let (states, unitaries) = counterexample_values(&circ("qubits 1\nh 0\ns 0\n")).expect("values");
    let sub = unitaries[2] <= unitaries[0] + unitaries[1];
    ok(states == [0, 0, 1] && sub, format!("states={states:?} unitaries={unitaries:?}"))
}

fn soundness() -> Outcome {
    let r = run_check("soundness", 0, Scale::Standard).expect("known check");
    let tof = stabnull_core::t_count_lower_bound::<E>(&toffoli_clifford_t()).expect("bound");
    ok(
        r.passed && tof.bound == 3 && tof.t_gates_used == 7,
        format!("corpus={} toffoli bound={} of {} T gates", r.witness["corpus"], tof.bound, tof.t_gates_used),
    )
}

fn backend_agreement() -> Outcome {
    let r = run_check("backend_agreement", 0, Scale::Standard).expect("known check");
    let c = special_family(4);
    let se = compute_s_unitary(&exact(&c)).unwrap().s;
    let sf = compute_s_unitary(&build_unitary::<Complex64>(&c).unwrap()).unwrap().s;
    ok(r.passed && se == sf, format!("corpus={} special_family(4) s exact={se} float={sf}", r.witness["corpus"]))
}

fn main() -> ExitCode {
    // Spin up the thread pool before anything is timed.
    let _ = nullity(&circ("qubits 2\nh 0\n"));

    let criteria: Vec<Criterion> = vec![
        (1, "T transfer matrix and v(T) = 1", Duration::from_millis(1), Box::new(t_transfer_matrix)),
        (2, "CCZ unitary and state nullity 3", Duration::from_secs(5), Box::new(ccz_nullities)),
        (3, "special family n=3 nullity 6", Duration::from_secs(2), Box::new(|| special_family_at(3))),
        (3, "special family n=4 nullity 8", Duration::from_secs(30), Box::new(|| special_family_at(4))),
        (4, "strict separation", Duration::from_secs(60), Box::new(strict_separation)),
        (5, "ancilla attainment", Duration::from_secs(30), Box::new(ancilla_attainment)),
        (6, "property suite", Duration::from_secs(120), Box::new(property_suite)),
        (7, "closed form of f", Duration::from_secs(10), Box::new(f_identity)),
        (8, "state counterexample", Duration::from_secs(1), Box::new(counterexample)),
        (9, "soundness", Duration::from_secs(10), Box::new(soundness)),
        (10, "backend agreement", Duration::from_secs(120), Box::new(backend_agreement)),
    ];

    let mut all = true;
    for (id, name, limit, run) in &criteria {
        let start = Instant::now();
        let out = run();
        let took = start.elapsed();
        let in_time = took <= *limit;
        let pass = out.passed && in_time;
        all &= pass;
        println!(
            "criterion {id:>2} {}: {name} ({}; {:.3} ms, limit {} ms)",
            if pass { "PASS" } else { "FAIL" },
            out.detail,
            took.as_secs_f64() * 1e3,
            limit.as_millis(),
        );
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
